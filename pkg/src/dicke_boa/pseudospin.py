"""Fast-pseudospin Born-Oppenheimer approximation.

For fixed field quadrature q the pseudospin precesses about the axis
(sin beta, 0, cos beta) with cos beta = omega0 / omega_P(q) and
omega_P(q) = sqrt(omega0**2 + (b q)**2), b = 2 gamma / sqrt(j). The projection
m' on that axis is the adiabatic invariant and the field moves in

    V_m'(q) = omega q**2 / 2 + m' omega_P(q).

Energies are reduced as eps = E / (omega0 j) and x = m' / j; the turning
points then satisfy q**2 = (2 j omega0 / omega) (eps + x**2 f**2 -/+ x sqrt(D))
with D = 1 + 2 eps f**2 + x**2 f**4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bands import BandSpectrum
from .errors import BarrierTop, BelowBandMinimum, DomainError, FlatMinimum, NonMonotoneAction, OutOfRange
from .model import ModelParams
from .numerics.quadrature import QuadratureSpec, Singularity, integrate_singular
from .numerics.roots import find_root

BARRIER_GUARD = 1e-9
FLAT_TOL = 1e-12
_LEFT = QuadratureSpec(rel_tol=1e-11, max_subdivisions=400, singularity=Singularity.LEFT)
_RIGHT = QuadratureSpec(rel_tol=1e-11, max_subdivisions=400, singularity=Singularity.RIGHT)


class Quantization(str, Enum):
    INTEGER = "Integer"
    HALF_INTEGER = "HalfInteger"


@dataclass(frozen=True)
class PseudospinBand:
    m_prime: float
    e_min: float
    q_min: tuple
    double_well: bool


@dataclass(frozen=True)
class AllowedRegion:
    """Classically allowed q-intervals; q_minus is the outer turning point."""

    intervals: tuple
    q_plus: float
    q_minus: float


@dataclass(frozen=True)
class SemiclassicalPoint:
    E: float
    m_prime: float
    nu: float
    n_phot: float
    jz: float


def _check_m(m_prime, params):
    if abs(m_prime) > params.j * (1 + 1e-12):
        raise OutOfRange(f"m' = {m_prime} outside [-j, j]")


def precession_frequency(q, params: ModelParams):
    return np.sqrt(params.omega0**2 + (params.coupling * np.asarray(q, dtype=float)) ** 2)


def potential(q, m_prime: float, params: ModelParams):
    q = np.asarray(q, dtype=float)
    v = 0.5 * params.omega * q * q + m_prime * precession_frequency(q, params)
    return float(v) if v.ndim == 0 else v


def is_double_well(m_prime: float, params: ModelParams) -> bool:
    f = params.f
    return f > 1 and m_prime < -params.j / (f * f)


def band_minimum(m_prime: float, params: ModelParams) -> PseudospinBand:
    _check_m(m_prime, params)
    j, w0, f = params.j, params.omega0, params.f
    if is_double_well(m_prime, params):
        x = m_prime / j
        e_min = -0.5 * j * w0 * (f**-2 + x * x * f * f)
        q0 = (w0 * math.sqrt(j) / (2 * params.gamma)) * math.sqrt(x * x * f**4 - 1)
        return PseudospinBand(m_prime, e_min, (-q0, q0), True)
    return PseudospinBand(m_prime, m_prime * w0, (0.0,), False)


def band_head_frequencies(m_prime: float, params: ModelParams) -> tuple[float, float]:
    """(omega_B, omega_F): curvature frequency of V_m' and omega_P at its minimum."""
    _check_m(m_prime, params)
    j, w, w0, f = params.j, params.omega, params.omega0, params.f
    x = m_prime / j
    if abs(1 + x * f * f) <= FLAT_TOL:
        raise FlatMinimum("slow frequency vanishes at m' = -j/f**2")
    if is_double_well(m_prime, params):
        return w * math.sqrt(1 - 1 / (x * x * f**4)), w0 * abs(x) * f * f
    return w * math.sqrt(1 + x * f * f), w0


def _turning_squares(E, m_prime, params):
    """(u_outer, u_inner) in units of q**2; u_inner may be negative."""
    j, w, w0, f = params.j, params.omega, params.omega0, params.f
    scale = 2 * j * w0 / w
    eps = E / (w0 * j)
    x = m_prime / j
    D = max(1 + 2 * eps * f * f + x * x * f**4, 0.0)
    s = eps + x * x * f * f
    r = x * math.sqrt(D)
    # product of the two roots is eps**2 - x**2 = (eps - x)(eps + x)
    prod = ((E - m_prime * w0) / (w0 * j)) * (eps + x)
    if s - r >= s + r:
        outer = s - r
        inner = prod / outer if outer != 0 else s + r
    else:
        inner = s + r
        outer = prod / inner if inner != 0 else s - r
    return scale * outer, scale * inner


def allowed_region(E: float, m_prime: float, params: ModelParams) -> AllowedRegion:
    band = band_minimum(m_prime, params)
    if E < band.e_min - 1e-12 * max(1.0, abs(band.e_min)):
        raise BelowBandMinimum(f"E = {E} below band minimum {band.e_min}")
    u_out, u_in = _turning_squares(E, m_prime, params)
    if m_prime == 0:
        u_out, u_in = 2 * E / params.omega, -1.0
    q_out = math.sqrt(max(u_out, 0.0))
    if band.double_well and E <= m_prime * params.omega0 and u_in >= 0:
        q_in = min(math.sqrt(u_in), q_out)
        return AllowedRegion(((-q_out, -q_in), (q_in, q_out)), q_in, q_out)
    return AllowedRegion(((-q_out, q_out),), 0.0, q_out)


def _gap_about(E, q_e, m_prime, params):
    """E - V(q) written as V(q_e) - V(q) without cancellation near q_e."""
    w, b = params.omega, params.coupling
    wp_e = math.sqrt(params.omega0**2 + (b * q_e) ** 2)

    def gap(q):
        wp = math.sqrt(params.omega0**2 + (b * q) ** 2)
        return (q_e - q) * (q_e + q) * (0.5 * w + m_prime * b * b / (wp_e + wp))

    return gap


def _half_integrals(E, m_prime, params, weight, power):
    """Sum over the positive-q allowed interval of weight(q) * gap**power.

    Each interval is split at its midpoint so that every piece carries a
    single singular (or square-root) endpoint, where the gap is evaluated
    relative to that endpoint.
    """
    region = allowed_region(E, m_prime, params)
    lo, hi = region.intervals[-1]
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0

    def piece(q_e, a, b, spec):
        gap = _gap_about(E, q_e, m_prime, params)

        def integrand(q):
            g = gap(q)
            if g <= 0:
                return 0.0
            return weight(q) * g**power

        return integrate_singular(integrand, a, b, spec)

    if lo == 0.0 and len(region.intervals) == 1:
        # symmetric single interval: only the outer end is singular
        return piece(hi, 0.0, hi, _RIGHT)
    mid = 0.5 * (lo + hi)
    return piece(lo, lo, mid, _LEFT) + piece(hi, mid, hi, _RIGHT)


def _check_barrier(E, m_prime, params):
    if is_double_well(m_prime, params) and abs(E - m_prime * params.omega0) <= BARRIER_GUARD * params.omega0:
        raise BarrierTop("energy on the barrier top of the double well")


def _check_above(E, m_prime, params):
    band = band_minimum(m_prime, params)
    if E <= band.e_min:
        raise BelowBandMinimum(f"E = {E} not above band minimum {band.e_min}")


def _weighted(E, m_prime, params, weight):
    _check_above(E, m_prime, params)
    _check_barrier(E, m_prime, params)
    return _half_integrals(E, m_prime, params, weight, -0.5)


def dos(E: float, m_prime: float, params: ModelParams) -> float:
    """Semiclassical density of states of band m' at energy E."""
    total = 2 * _weighted(E, m_prime, params, lambda q: 1.0)
    return math.sqrt(2 / params.omega) * total / (2 * math.pi)


def expect_photons(E: float, m_prime: float, params: ModelParams) -> float:
    w0, b, w = params.omega0, params.coupling, params.omega
    norm = _weighted(E, m_prime, params, lambda q: 1.0)
    num = _weighted(E, m_prime, params,
                    lambda q: (E - m_prime * math.sqrt(w0 * w0 + (b * q) ** 2)) / w)
    return num / norm


def expect_jz(E: float, m_prime: float, params: ModelParams) -> float:
    w0, b = params.omega0, params.coupling
    norm = _weighted(E, m_prime, params, lambda q: 1.0)
    num = _weighted(E, m_prime, params, lambda q: m_prime * w0 / math.sqrt(w0 * w0 + (b * q) ** 2))
    return num / norm


def semiclassical_point(E: float, m_prime: float, params: ModelParams) -> SemiclassicalPoint:
    return SemiclassicalPoint(E, m_prime, dos(E, m_prime, params), expect_photons(E, m_prime, params),
                              expect_jz(E, m_prime, params))


def action(E: float, m_prime: float, params: ModelParams, per_well: bool = False) -> float:
    """Closed-orbit action of band m'; summed over both wells unless ``per_well``."""
    band = band_minimum(m_prime, params)
    if E <= band.e_min:
        if E < band.e_min - 1e-12 * max(1.0, abs(band.e_min)):
            raise BelowBandMinimum(f"E = {E} below band minimum {band.e_min}")
        return 0.0
    half = _half_integrals(E, m_prime, params, lambda q: 1.0, 0.5)
    region = allowed_region(E, m_prime, params)
    s_well = 2 * math.sqrt(2 / params.omega) * half
    if len(region.intervals) == 2:
        return s_well if per_well else 2 * s_well
    # symmetric single interval: half covers [0, q_out]
    return 2 * s_well


def _solve_level(target, S, lo, step, tol):
    hi = lo + step
    while S(hi) < target:
        lo, hi, step = hi, hi + 2 * step, 2 * step
    return find_root(lambda e: S(e) - target, lo, hi, tol)


def bohr_sommerfeld_levels(m_prime: float, params: ModelParams, count: int,
                           convention=Quantization.HALF_INTEGER, tol: float = 1e-12) -> BandSpectrum:
    """Levels of band m' from S(E) = 2 pi (n + c), c = 1/2 or 0.

    Below the barrier of a double well each well is quantized separately
    and its levels are reported with degeneracy 2. ``count`` is the number
    of states, doublets counting twice.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    c = 0.5 if Quantization(convention) is Quantization.HALF_INTEGER else 0.0
    band = band_minimum(m_prime, params)
    tol = tol * max(1.0, abs(band.e_min))
    scale = params.omega
    energies, index, degen = [], [], []
    emitted = 0
    n = 0
    if band.double_well:
        e_bar = m_prime * params.omega0
        s_bar = action(e_bar, m_prime, params, per_well=True)
        S_well = lambda e: action(e, m_prime, params, per_well=True)
        while emitted < count and 2 * math.pi * (n + c) < s_bar:
            target = 2 * math.pi * (n + c)
            if target == 0:
                e = band.e_min
            else:
                e = find_root(lambda x: S_well(x) - target, band.e_min, e_bar, tol)
            energies.append(e)
            index.append(n)
            degen.append(2)
            emitted += 2
            n += 1
        n_full = math.ceil(2 * s_bar / (2 * math.pi) - c)
        lo = e_bar
    else:
        n_full = 0
        lo = band.e_min
    S = lambda e: action(e, m_prime, params)
    k = n_full
    while emitted < count:
        target = 2 * math.pi * (k + c)
        e = band.e_min if target == 0 else _solve_level(target, S, lo, scale, tol)
        energies.append(e)
        index.append(k)
        degen.append(1)
        emitted += 1
        lo = e
        k += 1
    E = np.array(energies)
    if np.any(np.diff(E) < 0):
        raise NonMonotoneAction("levels are not ordered")
    return BandSpectrum("pseudospin", m_prime, np.array(index), E, np.array(degen))
