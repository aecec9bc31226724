"""Acceptance criteria, each at its stated tolerance.

Every test records one verdict line through ``criterion_log``; the lines
are printed in the terminal summary.
"""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from dicke_boa import boson as bo
from dicke_boa import classical as cl
from dicke_boa import pseudospin as ps
from dicke_boa.model import ModelParams, Regime, border_omega_ratio, classify_regime
from dicke_boa.quantum import (FockSpinBasis, Observable, build_hamiltonian, build_observable,
                               converge_and_diagonalize, converge_lowest, parity_blocks, peres_lattice)
from dicke_boa.requantize import boson_ladder, pseudospin_ladder


def record(log, key, ok, detail):
    log[key] = (bool(ok), detail)
    assert ok, f"{key}: {detail}"


def lattices(p, window, *tags):
    basis, dec = converge_and_diagonalize(p, window)
    return basis, [peres_lattice(dec, build_observable(t, p, basis)) for t in tags]


# 1 ------------------------------------------------------------------------

def test_a1_quoted_ratios(criterion_log):
    cases = [(0.8, 10, 16.67), (2, 1, 4.13), (3, 0.2, 45.28), (3, 20, 2.24)]
    worst = 0.0
    for f, r, quoted in cases:
        worst = max(worst, abs(classify_regime(ModelParams.from_f(r, 1, f, 10)).ratio - quoted))
    record(criterion_log, "A1", worst <= 0.01, f"max |ratio - quoted| = {worst:.4f} (tol 0.01)")


# 2 ------------------------------------------------------------------------

def test_a2_validity_map_structure(criterion_log):
    n = 80
    fs = (np.arange(n) + 0.5) * 4 / n
    rs = (np.arange(n) + 0.5) * 12 / n
    off_line, misplaced = [], []
    for f in fs:
        line = border_omega_ratio(f)
        if classify_regime(ModelParams.from_f(line, 1, f, 10)).regime is not Regime.NEITHER:
            off_line.append(f)
        for r in rs:
            v = classify_regime(ModelParams.from_f(r, 1, f, 10)).regime
            if (v is Regime.FAST_PSEUDOSPIN and r > line) or (v is Regime.FAST_BOSON and r < line):
                misplaced.append((f, r))
    detail = (f"{len(off_line)}/{n} line points not Neither"
              + (f" (f in [{min(off_line):.3f}, {max(off_line):.3f}])" if off_line else "")
              + f"; {len(misplaced)} cells on the wrong side")
    record(criterion_log, "A2", not off_line and not misplaced, detail)


# 3 ------------------------------------------------------------------------

def test_a3_harmonic_limit(criterion_log):
    w, w0, j = 0.7, 1.3, 3
    p = ModelParams(w, w0, 0, j)
    errs = {}
    # window edges kept off the lattice {omega n + omega0 m}
    basis, dec = converge_and_diagonalize(p, (-4.0, 2.05))
    n, m = np.meshgrid(np.arange(basis.n_max + 1), np.arange(-j, j + 1))
    ref = np.sort((w * n + w0 * m).ravel())
    ref = ref[(ref >= -4.0) & (ref <= 2.05)]
    errs["spectrum"] = np.max(np.abs(np.sort(dec.energies) - ref) / np.abs(ref).clip(1))
    rel = []
    for mp in (-3, -1, 2):
        for Eb in (0.2, 1.7):
            E = w0 * mp + Eb
            rel += [abs(ps.dos(E, mp, p) * w - 1), abs(ps.expect_photons(E, mp, p) / ((E - w0 * mp) / w) - 1)]
    errs["pseudospin"] = max(rel)
    rel = []
    for nb in (0, 2):
        for E in (-3.0, 0.4, 3.5):
            Eb = E + w * nb
            rel += [abs(bo.dos(Eb, nb, p) * w0 - 1), abs(bo.expect_jz(Eb, nb, p) / (E / w0) - 1)]
    errs["boson"] = max(rel)
    lv = ps.bohr_sommerfeld_levels(-2, p, 8).energies
    errs["bohr-sommerfeld"] = np.max(np.abs(lv / (w0 * -2 + w * (np.arange(8) + 0.5)) - 1))
    worst = max(errs.values())
    record(criterion_log, "A3", worst <= 1e-8,
           "max rel err " + ", ".join(f"{k} {v:.1e}" for k, v in errs.items()) + " (tol 1e-8)")


# 4 ------------------------------------------------------------------------

def boson_band_zero(f, j=20):
    p = ModelParams.from_f(10, 1, f, j)
    _, (jz, shifted) = lattices(p, (-3 * j, 1.3 * j), Observable.JZ, Observable.SHIFTED_NUMBER)
    band = np.argsort(shifted.expval, kind="stable")[: int(2 * j + 1)]
    band = np.sort(band)
    return p, jz, shifted, band


@pytest.fixture(scope="module")
def band_f08():
    return boson_band_zero(0.8)


@pytest.fixture(scope="module")
def band_f2():
    return boson_band_zero(2.0)


def test_a4_band_edges(criterion_log, band_f08, band_f2):
    j = 20
    p, jz, _, band = band_f08
    top = jz.energies[band].max() / j
    p, jz, shifted, band = band_f2
    E = jz.energies[band] / j
    start = E.min()
    # level crowding: smallest spacing inside the band within one parity
    spots = []
    for par in (1, -1):
        e = np.sort(E[jz.parity[band] == par])
        gaps = np.diff(e)
        k = int(np.argmin(gaps))
        spots.append(0.5 * (e[k] + e[k + 1]))
    esqpt = float(np.mean(spots))
    ok = abs(top - 1) <= 0.05 and abs(start + 2.125) <= 0.02 and abs(esqpt + 1) <= 0.05
    record(criterion_log, "A4", ok,
           f"f=0.8 top {top:.4f} (1 +/- 0.05); f=2 start {start:.4f} (-2.125 +/- 0.02), "
           f"crowding at {esqpt:.4f} (-1 +/- 0.05)")


# 5 ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fast_spin_lattices():
    p = ModelParams.from_f(0.2, 1, 3, 10)
    _, (jz, jzp) = lattices(p, (-4.6 * 10, -10), Observable.JZ, Observable.JZ_PRIME)
    return p, jz, jzp


def test_a5_semiclassical_jz(criterion_log, fast_spin_lattices):
    p, jz, jzp = fast_spin_lattices
    j = p.j
    worst = 0.0
    for m in (-10, -9, -8):
        sel = np.rint(jzp.expval) == m
        Eq, Xq = jz.energies[sel], jz.expval[sel]
        emin = ps.band_minimum(m, p).e_min
        for E in np.linspace(emin, -j, 7)[1:-1]:
            worst = max(worst, abs(ps.expect_jz(E, m, p) - np.interp(E, Eq, Xq)) / j)
    record(criterion_log, "A5", worst <= 3 / j, f"max |dJz|/j = {worst:.4f} (tol 3/j = {3 / j:.2f})")


# 6 ------------------------------------------------------------------------

def test_a6_bohr_sommerfeld_scan(criterion_log):
    j = 10
    worst, where, compared = 0.0, None, 0
    for f in np.round(np.arange(0, 1.51, 0.1), 10):
        if abs(f - 1) < 1e-9:
            continue
        p = ModelParams.from_f(0.1, 1, f, j)
        _, dec = converge_lowest(p, 12)
        exact = np.sort(dec.energies)[:12]
        bs = pseudospin_ladder(p, 12)
        d = np.abs((exact - exact[0]) - (bs - bs[0]))
        mask = exact / j < -1.05
        compared += int(mask.sum())
        if mask.any() and d[mask].max() > worst:
            worst, where = d[mask].max(), f
    record(criterion_log, "A6", worst <= 0.1, f"max |dEx|/omega0 = {worst:.4f} at f={where} over {compared} states (tol 0.1)")


# 7 ------------------------------------------------------------------------

def test_a7_lmg_scan(criterion_log):
    j, w = 20, 10.0
    worst, where = 0.0, None
    for f in np.round(np.arange(0.1, 2.01, 0.1), 10):
        if abs(f - 1) < 1e-9:
            continue
        p = ModelParams.from_f(w, 1, f, j)
        top = w + j
        E, P, N = boson_ladder(p, top + 0.5 * w)
        _, dec = converge_and_diagonalize(p, (E[0] - 5, top + 0.5 * w))
        for par in (1, -1):
            ex = np.sort(dec.energies[dec.parity == par])
            lad, nb = E[P == par], N[P == par]
            k = min(ex.size, lad.size)
            keep = nb[:k] <= 1
            d = np.abs(ex[:k] - lad[:k])[keep].max() / w
            if d > worst:
                worst, where = d, f
    record(criterion_log, "A7", worst <= 0.05, f"max |dE|/omega = {worst:.4f} at f={where} (tol 0.05)")


# 8 ------------------------------------------------------------------------

def test_a8a_jzprime_ladder(criterion_log):
    p = ModelParams.from_f(0.2, 1, 3, 10)
    basis, dec = converge_lowest(p, 10, vectors=True)
    lat = peres_lattice(dec, build_observable(Observable.JZ_PRIME, p, basis))
    spread = lat.uncert[:10].max()
    off = np.abs(lat.expval[:10] - np.rint(lat.expval[:10])).max()
    record(criterion_log, "A8a", spread <= 0.1 and off <= 0.1,
           f"max dJz' = {spread:.4f}, max distance to integer = {off:.4f} (tol 0.1)")


def test_a8b_shifted_number_band(criterion_log, band_f2):
    p, jz, shifted, band = band_f2
    k = int(np.argmax(shifted.uncert[band]))
    worst = shifted.uncert[band][k]
    record(criterion_log, "A8b", worst <= 0.2,
           f"max d(b+b) = {worst:.4f} at E/(omega0 j) = {jz.energies[band][k] / p.j:.4f} (tol 0.2)")


# 9 ------------------------------------------------------------------------

def test_a9a_energy_drift(criterion_log):
    p = ModelParams.from_f(1, 1, 2, 10)
    inits = cl.energy_shell_initials(-14.0, p, 8, 8)[::4]
    drift = max(cl.integrate(s, p, 1000, 0.5).energy_drift for _, _, s in inits)
    record(criterion_log, "A9a", drift <= 1e-6, f"max relative drift over T=1000: {drift:.2e} (tol 1e-6)")


def test_a9b_band_head_frequencies(criterion_log):
    p = ModelParams.from_f(0.2, 1, 3, 10)
    pts = cl.band_head_frequency_scan(np.linspace(-1, -0.5, 11) * p.j, p, 0.05 * 2**15, 0.05)
    worst = max(max(abs(x.slow / x.slow_predicted - 1), abs(x.fast / x.fast_predicted - 1)) for x in pts)
    record(criterion_log, "A9b", worst <= 0.02, f"max relative peak error {worst:.4f} (tol 0.02)")


def test_a9c_variance_contrast(criterion_log):
    means = []
    for w, f in ((1, 2), (0.2, 3)):
        p = ModelParams.from_f(w, 1, f, 10)
        rows = cl.variance_map(-1.4 * p.j, p, 20, 20, 300, 0.05)
        assert np.all(np.isfinite(rows[:, 2]))
        means.append(rows[:, 2].mean())
    ratio = means[0] / means[1]
    record(criterion_log, "A9c", ratio >= 5,
           f"mean dJz'/j {means[0]:.4f} vs {means[1]:.4f}, ratio {ratio:.2f} (need >= 5)")


# 10 -----------------------------------------------------------------------

def test_a10_property_suite(criterion_log):
    checks = {}
    p, b = ModelParams.from_f(1.3, 1, 2.0, 4), FockSpinBasis(40, 4)
    H = build_hamiltonian(p, b)
    par = b.parity()
    checks["parity block"] = np.max(np.abs(H[np.ix_(par == 1, par == -1)])) == 0
    n, m = b.labels()
    checks["trace"] = abs(np.linalg.eigvalsh(H).sum() / np.sum(1.3 * n + m) - 1) <= 1e-10
    checks["blocks"] = sum(blk.indices.size for blk in parity_blocks(p, b)) == b.dim

    sr = ModelParams.from_f(1, 1, 2, 10)
    rel = []
    for mp, E in ((-10, -15.0), (-10, -5.0), (-6, -3.0), (-3, 2.0)):
        h = 1e-6
        dS = (ps.action(E + h, mp, sr) - ps.action(E - h, mp, sr)) / (2 * h)
        rel.append(abs(dS / (2 * math.pi * ps.dos(E, mp, sr)) - 1))
    checks["dS/dE"] = max(rel) <= 1e-4

    p20 = ModelParams.from_f(10, 1, 2, 20)
    band, _ = bo.band_minimum_and_frequency(0, p20)
    count, _ = quad(lambda E: bo.dos(E, 0, p20), band.e_min, band.e_max, points=[-20.0], limit=400)
    checks["state count"] = abs(count / 40 - 1) <= 0.02

    s = cl.energy_shell_initials(-14.0, sr, 8, 8)[0][2]
    fwd = cl.integrate(s, sr, 10, 10)
    back = cl.integrate(cl.ClassicalState.from_array(fwd.states[-1]).time_reversed(), sr, 10, 10)
    ret = cl.ClassicalState.from_array(back.states[-1]).time_reversed().as_array()
    checks["time reversal"] = np.max(np.abs(ret - s.as_array())) <= 1e-6

    failed = [k for k, ok in checks.items() if not ok]
    record(criterion_log, "A10", not failed,
           f"{len(checks) - len(failed)}/{len(checks)} pass; count {count:.3f} vs 40, dS/dE err {max(rel):.1e}"
           + (f"; failed: {failed}" if failed else ""))
