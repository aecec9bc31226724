"""Spectral peak extraction from uniformly sampled signals."""
from __future__ import annotations

import numpy as np
from scipy.signal import find_peaks

from ..errors import TooFewSamples

MIN_SAMPLES = 2**12
PAD_FACTOR = 8


SIDELOBE_BINS = 8


def principal_frequency(samples, dt: float, max_peaks: int = 8, rel_height: float = 5e-3):
    """Dominant frequencies (cycles per unit time) of a real signal.

    The mean is removed, a Hann window applied and the series zero-padded by
    a factor 8 before the FFT. Each local maximum of the amplitude spectrum
    is refined by a parabola through the log-amplitudes of its neighbours.
    Returns up to ``max_peaks`` (frequency, amplitude) pairs sorted by
    decreasing amplitude, ignoring peaks below ``rel_height`` of the largest
    and window sidelobes within a few resolution bins of a stronger peak.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {n}")
    win = np.hanning(n)
    y = (x - x.mean()) * win
    nfft = PAD_FACTOR * n
    amp = np.abs(np.fft.rfft(y, nfft)) * 2 / win.sum()
    if not np.any(amp > 0):
        return []
    idx, _ = find_peaks(amp, height=rel_height * amp.max())
    out = []
    df = 1.0 / (nfft * dt)
    tiny = np.finfo(float).tiny
    for k in idx:
        la, lb, lc = np.log(np.maximum(amp[k - 1: k + 2], tiny))
        denom = la - 2 * lb + lc
        delta = 0.5 * (la - lc) / denom if denom != 0 else 0.0
        out.append(((k + delta) * df, float(np.exp(lb - 0.25 * (la - lc) * delta))))
    out.sort(key=lambda p: -p[1])
    kept = []
    guard = SIDELOBE_BINS / (n * dt)
    for f, a in out:
        if all(abs(f - g) > guard for g, _ in kept):
            kept.append((f, a))
    return kept[:max_peaks]
