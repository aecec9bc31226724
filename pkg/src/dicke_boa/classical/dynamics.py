"""Classical Dicke dynamics from the coherent-state Hamiltonian

    H_cl = (omega/2)(p**2 + q**2) + omega0 j_z + b q j_x,   b = 2 gamma / sqrt(j),

with the spin propagated in Cartesian components, dj/dt = B x j and
B = (b q, 0, omega0). This is the Poisson-bracket form of the canonical
(phi, j_z) equations and has no pole singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import DomainError, EnergyDriftExceeded, InvalidTrajectory, OutOfRange
from ..model import ModelParams
from ..numerics.spectral import principal_frequency
from ..pseudospin import band_head_frequencies, band_minimum
from . import _dp5_py

try:
    from . import _dp5 as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
DRIFT_TOL = 1e-6
CHAOS_THRESHOLD = 0.05


def _kernel(backend: Optional[str]):
    name = BACKEND if backend is None else backend
    if name == "cython":
        if _compiled is None:
            raise DomainError("compiled kernel is not available")
        return _compiled.run
    if name == "python":
        return _dp5_py.run
    raise DomainError(f"unknown backend {name!r}")


@dataclass(frozen=True)
class ClassicalState:
    q: float
    p: float
    jx: float
    jy: float
    jz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.p, self.jx, self.jy, self.jz])

    @classmethod
    def from_array(cls, y) -> "ClassicalState":
        return cls(*(float(v) for v in y))

    def time_reversed(self) -> "ClassicalState":
        return ClassicalState(self.q, -self.p, self.jx, -self.jy, self.jz)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    energy_drift: float
    norm_drift: float
    renorm_max: float
    valid: bool
    params: ModelParams
    crossings: np.ndarray = field(default_factory=lambda: np.zeros((0, 6)))
    steps: int = 0
    rejected: int = 0

    @property
    def final(self) -> ClassicalState:
        return ClassicalState.from_array(self.states[-1])


@dataclass(frozen=True)
class PoincareSection:
    surface: str
    phi: np.ndarray
    jz_over_j: np.ndarray
    traj_id: np.ndarray


def _as_array(state) -> np.ndarray:
    return state.as_array() if isinstance(state, ClassicalState) else np.asarray(state, dtype=float)


def hamiltonian(state, params: ModelParams):
    y = _as_array(state)
    q, p, jx, jz = y[..., 0], y[..., 1], y[..., 2], y[..., 4]
    e = 0.5 * params.omega * (p * p + q * q) + params.omega0 * jz + params.coupling * q * jx
    return float(e) if np.ndim(e) == 0 else e


def eom_rhs(state, params: ModelParams) -> np.ndarray:
    y = _as_array(state)
    return np.array(_dp5_py._rhs(list(y), params.omega, params.omega0, params.coupling))


def jzprime_classical(state, params: ModelParams):
    """Spin projection on the local precession axis (sin beta, 0, cos beta)."""
    y = _as_array(state)
    bq = params.coupling * y[..., 0]
    r = (params.omega0 * y[..., 4] + bq * y[..., 2]) / np.sqrt(params.omega0**2 + bq * bq)
    return float(r) if np.ndim(r) == 0 else r


def integrate(initial, params: ModelParams, T: float, dt_out: float, *, rtol: float = 1e-10,
              atol: float = 1e-12, renormalize: bool = True, section: bool = False,
              drift_tol: float = DRIFT_TOL, raise_on_drift: bool = False, backend: Optional[str] = None,
              max_steps: int = 50_000_000) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) integration sampled every ``dt_out``.

    ``T`` may be negative. The trajectory is flagged invalid when the
    relative energy drift exceeds ``drift_tol`` (or raises
    EnergyDriftExceeded with ``raise_on_drift``).
    """
    if T == 0 or not dt_out > 0:
        raise DomainError("need T != 0 and dt_out > 0")
    y0 = _as_array(initial)
    run = _kernel(backend)
    states, cross, steps, rejected, renorm = run(y0, params.omega, params.omega0, params.coupling,
                                                  float(T), float(dt_out), rtol, atol, renormalize,
                                                  section, max_steps)
    times = np.arange(states.shape[0]) * dt_out * (1 if T > 0 else -1)
    energies = hamiltonian(states, params)
    e0 = energies[0]
    scale = abs(e0) if abs(e0) > 1e-12 * params.omega0 * params.j else params.omega0 * params.j
    drift = float(np.max(np.abs(energies - e0)) / scale)
    jlen = np.linalg.norm(y0[2:])
    norms = np.linalg.norm(states[:, 2:], axis=1)
    norm_drift = float(np.max(np.abs(norms - jlen)))
    valid = drift <= drift_tol
    traj = Trajectory(times, states, energies, drift, norm_drift, float(renorm), valid, params,
                      cross, steps, rejected)
    if raise_on_drift and not valid:
        raise EnergyDriftExceeded(f"relative energy drift {drift:.3e} exceeds {drift_tol:.1e}")
    return traj


def temporal_variance_jzprime(traj: Trajectory) -> float:
    """Time standard deviation of j_z' over the trajectory, divided by j."""
    if not traj.valid:
        raise InvalidTrajectory("trajectory failed its energy drift check")
    t = np.abs(traj.times)
    span = t[-1] - t[0]
    jp = jzprime_classical(traj.states, traj.params)
    mean = np.trapezoid(jp, t) / span
    second = np.trapezoid(jp * jp, t) / span
    return math.sqrt(max(second - mean * mean, 0.0)) / traj.params.j


def band_head_initials(m_prime: float, params: ModelParams) -> ClassicalState:
    """Field at the (positive) minimum of V_m', spin at projection m' on the
    local precession axis with its transverse part along the rotated x axis."""
    j = params.j
    if abs(m_prime) > j * (1 + 1e-12):
        raise OutOfRange(f"m' = {m_prime} outside [-j, j]")
    band = band_minimum(m_prime, params)
    q = max(band.q_min)
    bq = params.coupling * q
    wp = math.hypot(params.omega0, bq)
    cb, sb = params.omega0 / wp, bq / wp
    perp = math.sqrt(max(j * j - m_prime * m_prime, 0.0))
    return ClassicalState(q, 0.0, m_prime * sb + perp * cb, 0.0, m_prime * cb - perp * sb)


def energy_shell_initials(E: float, params: ModelParams, n_phi: int, n_jz: int):
    """Initial conditions with p = 0 on the shell H_cl = E over a uniform
    (phi, j_z/j) grid of cell centres; both q roots are kept.

    Returns a list of (phi0, jz0/j, ClassicalState).
    """
    j, w, b = params.j, params.omega, params.coupling
    out = []
    for a in range(n_phi):
        phi = 2 * math.pi * (a + 0.5) / n_phi
        for c in range(n_jz):
            z = -1 + 2 * (c + 0.5) / n_jz
            jz = z * j
            rho = j * math.sqrt(1 - z * z)
            jx, jy = rho * math.cos(phi), rho * math.sin(phi)
            # (w/2) q**2 + b jx q + (omega0 jz - E) = 0
            A, B, C = 0.5 * w, b * jx, params.omega0 * jz - E
            disc = B * B - 4 * A * C
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            r1 = (-B - sq) / (2 * A) if B >= 0 else (-B + sq) / (2 * A)
            r2 = C / (A * r1) if r1 != 0 else -r1
            for q in sorted({r1, r2}):
                out.append((phi, z, ClassicalState(q, 0.0, jx, jy, jz)))
    return out


def poincare_section(traj_or_initials, params: ModelParams, E: Optional[float] = None, T: float = 200.0,
                     backend: Optional[str] = None) -> PoincareSection:
    """Upward (dp/dt > 0) crossings of p = 0, as (phi mod 2 pi, j_z/j).

    Accepts a single trajectory integrated with ``section=True`` or a
    sequence of initial states, which are then integrated for time ``T``.
    """
    if isinstance(traj_or_initials, Trajectory):
        trajs = [traj_or_initials]
    else:
        inits = list(traj_or_initials)
        if E is not None:
            for s in inits:
                if abs(hamiltonian(s, params) - E) > 1e-10 * max(abs(E), params.omega0):
                    raise DomainError("initial condition is off the energy shell")
        trajs = [integrate(s, params, T, T, section=True, backend=backend) for s in inits]
    phis, zs, ids = [], [], []
    for k, tr in enumerate(trajs):
        c = tr.crossings
        if c.size == 0:
            continue
        phis.append(np.mod(np.arctan2(c[:, 4], c[:, 3]), 2 * math.pi))
        zs.append(c[:, 5] / params.j)
        ids.append(np.full(c.shape[0], k))
    if not phis:
        return PoincareSection("p=0, dp/dt>0", np.zeros(0), np.zeros(0), np.zeros(0, dtype=int))
    return PoincareSection("p=0, dp/dt>0", np.concatenate(phis), np.concatenate(zs), np.concatenate(ids))


def variance_map(E: float, params: ModelParams, n_phi: int, n_jz: int, T: float, dt_out: float,
                 threshold: float = CHAOS_THRESHOLD, backend: Optional[str] = None):
    """Delta j_z'/j for energy-shell initial conditions; rows
    (phi0, jz0/j, delta, chaotic_flag). Invalid trajectories give NaN."""
    rows = []
    for phi, z, s in energy_shell_initials(E, params, n_phi, n_jz):
        tr = integrate(s, params, T, dt_out, backend=backend)
        d = temporal_variance_jzprime(tr) if tr.valid else float("nan")
        rows.append((phi, z, d, bool(d > threshold)))
    return np.array(rows, dtype=float).reshape(-1, 4)


@dataclass(frozen=True)
class FrequencyPoint:
    m_prime: float
    slow: float
    fast: float
    slow_predicted: float
    fast_predicted: float
    slow_amplitude: float = float("nan")
    fast_amplitude: float = float("nan")


def band_head_frequency_scan(m_values: Sequence[float], params: ModelParams, T: float, dt: float,
                             kick: float = 1e-3, backend: Optional[str] = None) -> list[FrequencyPoint]:
    """Principal angular frequencies of band-head trajectories.

    The field is displaced by ``kick * sqrt(j)`` from the band minimum so
    that the m' = -j fixed point still oscillates. The slow peak is read
    from q(t) and the fast one from j_x(t); each is the strongest peak on
    its side of the geometric mean of the two analytic band-head
    frequencies.
    """
    out = []
    for m in m_values:
        wb, wf = band_head_frequencies(m, params)
        split = math.sqrt(wb * wf)
        s = band_head_initials(m, params)
        s = ClassicalState(s.q + kick * math.sqrt(params.j), s.p, s.jx, s.jy, s.jz)
        tr = integrate(s, params, T, dt, backend=backend)
        slow, a_slow = _strongest(principal_frequency(tr.states[:, 0], dt, max_peaks=32), lambda w: w < split)
        fast, a_fast = _strongest(principal_frequency(tr.states[:, 2], dt, max_peaks=32), lambda w: w > split)
        out.append(FrequencyPoint(m, slow, fast, wb, wf, a_slow, a_fast))
    return out


def _strongest(peaks, keep):
    for f, amp in peaks:
        w = 2 * math.pi * f
        if keep(w):
            return w, amp
    return float("nan"), float("nan")
