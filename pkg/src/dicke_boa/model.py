"""Model parameters, phase bookkeeping and validity regions of the two
Born-Oppenheimer approximations.

Units: hbar = 1, all frequencies and couplings share one energy unit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import CriticalCoupling, DomainError

CRITICAL_TOL = 1e-12
VALIDITY_TOL = 0.05


class Phase(str, Enum):
    NORMAL = "Normal"
    CRITICAL = "Critical"
    SUPERRADIANT = "Superradiant"


class Regime(str, Enum):
    FAST_PSEUDOSPIN = "FastPseudospin"
    FAST_BOSON = "FastBoson"
    NEITHER = "Neither"


@dataclass(frozen=True)
class ModelParams:
    """Dicke model parameters.

    omega is the field frequency, omega0 the two-level splitting, gamma the
    atom-field coupling and j the pseudospin length (N = 2j atoms).
    """

    omega: float
    omega0: float
    gamma: float
    j: float

    def __post_init__(self):
        for name in ("omega", "omega0", "gamma"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.omega > 0 and self.omega0 > 0):
            raise DomainError("omega and omega0 must be positive")
        if not self.gamma >= 0:
            raise DomainError("gamma must be non-negative")
        two_j = 2 * self.j
        if two_j < 1 or abs(two_j - round(two_j)) > 1e-12:
            raise DomainError(f"2j must be a positive integer, got j={self.j}")
        object.__setattr__(self, "j", round(two_j) / 2)

    @classmethod
    def from_f(cls, omega: float, omega0: float, f: float, j: float) -> "ModelParams":
        """Build parameters with gamma = f * gamma_c."""
        if f < 0:
            raise DomainError("f must be non-negative")
        return cls(float(omega), float(omega0), f * math.sqrt(omega * omega0) / 2, j)

    @property
    def gamma_c(self) -> float:
        return math.sqrt(self.omega * self.omega0) / 2

    @property
    def f(self) -> float:
        return self.gamma / self.gamma_c

    @property
    def dim_spin(self) -> int:
        return round(2 * self.j) + 1

    @property
    def coupling(self) -> float:
        """Coefficient 2*gamma/sqrt(j) multiplying q*J_x in the q-p chart."""
        return 2 * self.gamma / math.sqrt(self.j)


@dataclass(frozen=True)
class DerivedScales:
    gamma_c: float
    f: float
    phase: Phase


@dataclass(frozen=True)
class QuadraticFrequencies:
    omega_plus: float
    omega_minus: float


@dataclass(frozen=True)
class RegimeVerdict:
    regime: Regime
    ratio: float
    max_rel_dev: float
    ratio_pseudospin: float
    ratio_boson: float
    dev_pseudospin: float
    dev_boson: float


def phase_of(f: float) -> Phase:
    if abs(f - 1) <= CRITICAL_TOL:
        return Phase.CRITICAL
    return Phase.NORMAL if f < 1 else Phase.SUPERRADIANT


def derived_scales(params: ModelParams) -> DerivedScales:
    f = params.f
    return DerivedScales(params.gamma_c, f, phase_of(f))


def quadratic_frequencies(params: ModelParams, *, allow_critical: bool = False) -> QuadraticFrequencies:
    """Normal-mode frequencies of the harmonic expansion about the ground state.

    At the critical coupling the low mode is soft; with ``allow_critical`` the
    degenerate pair (sqrt(omega**2 + omega0**2), 0) is returned instead of
    raising.
    """
    w, w0, f = params.omega, params.omega0, params.f
    if phase_of(f) is Phase.CRITICAL:
        if not allow_critical:
            raise CriticalCoupling("omega_minus vanishes at f = 1")
        return QuadraticFrequencies(math.hypot(w, w0), 0.0)
    if f < 1:
        s = w * w + w0 * w0
        disc = math.sqrt((w0 * w0 - w * w) ** 2 + 16 * params.gamma**2 * w * w0)
        plus_sq = (s + disc) / 2
        product_sq = (w * w0) ** 2 * (1 - f * f)
    else:
        a = w0 * w0 * f**4
        b = w * w
        disc = math.sqrt((a - b) ** 2 + 4 * (w * w0) ** 2)
        plus_sq = (a + b + disc) / 2
        product_sq = (w * w0) ** 2 * (f**4 - 1)
    # low branch from the product to avoid cancellation
    return QuadraticFrequencies(math.sqrt(plus_sq), math.sqrt(product_sq / plus_sq))


def pseudospin_lowest_frequencies(params: ModelParams) -> tuple[float, float]:
    """(omega_B, omega_F) of the lowest fast-pseudospin band m' = -j."""
    w, w0, f = params.omega, params.omega0, params.f
    if f > 1:
        return w * math.sqrt(1 - f**-4), w0 * f * f
    return w * math.sqrt(1 - f * f), w0


def boson_lowest_frequencies(params: ModelParams) -> tuple[float, float]:
    """(omega_B, omega_F) of the fast-boson approximation (any band n')."""
    w, w0, f = params.omega, params.omega0, params.f
    if f > 1:
        return w, w0 * math.sqrt(f**4 - 1)
    return w, w0 * math.sqrt(1 - f * f)


def _paired_deviation(pair: tuple[float, float], quad: QuadraticFrequencies) -> float:
    lo, hi = sorted(pair)
    devs = [abs(lo - quad.omega_minus) / quad.omega_minus, abs(hi - quad.omega_plus) / quad.omega_plus]
    return max(devs)


def classify_regime(params: ModelParams, tol: float = VALIDITY_TOL) -> RegimeVerdict:
    """Decide which fast-slow approximation is valid for ``params``.

    An approximation qualifies when its fast/slow ratio exceeds one and both
    of its lowest-band frequencies lie within ``tol`` (relative) of the
    quadratic frequencies, matched low-to-low and high-to-high. When both
    qualify the larger ratio wins. For ``Neither`` the reported ratio and
    deviation belong to the approximation with the larger ratio.
    """
    quad = quadratic_frequencies(params)
    ps_b, ps_f = pseudospin_lowest_frequencies(params)
    fb_b, fb_f = boson_lowest_frequencies(params)
    ratio_ps = ps_f / ps_b
    ratio_fb = fb_b / fb_f
    dev_ps = _paired_deviation((ps_b, ps_f), quad)
    dev_fb = _paired_deviation((fb_b, fb_f), quad)

    candidates = []
    if ratio_ps > 1 and dev_ps <= tol:
        candidates.append((ratio_ps, Regime.FAST_PSEUDOSPIN, dev_ps))
    if ratio_fb > 1 and dev_fb <= tol:
        candidates.append((ratio_fb, Regime.FAST_BOSON, dev_fb))
    if candidates:
        ratio, regime, dev = max(candidates, key=lambda c: c[0])
    else:
        regime = Regime.NEITHER
        ratio, dev = (ratio_ps, dev_ps) if ratio_ps >= ratio_fb else (ratio_fb, dev_fb)
    return RegimeVerdict(regime, ratio, dev, ratio_ps, ratio_fb, dev_ps, dev_fb)


def border_omega_ratio(f: float) -> float:
    """omega/omega0 on the line where both approximations exchange roles."""
    return 1.0 if f < 1 else f * f


def ratio_level_curve(kind: Regime, ratio: float, f: float) -> float:
    """omega/omega0 at which the given approximation has fast/slow = ratio."""
    if phase_of(f) is Phase.CRITICAL:
        raise CriticalCoupling("level curves are singular at f = 1")
    if kind is Regime.FAST_PSEUDOSPIN:
        g = 1 / math.sqrt(1 - f * f) if f < 1 else f**4 / math.sqrt(f**4 - 1)
        return g / ratio
    if kind is Regime.FAST_BOSON:
        h = math.sqrt(1 - f * f) if f < 1 else math.sqrt(f**4 - 1)
        return ratio * h
    raise DomainError("level curves exist only for the two approximations")
