"""Adaptive quadrature for integrands with inverse square-root endpoints."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from scipy import integrate

from ..errors import DomainError, NonConvergent


class Singularity(str, Enum):
    NONE = "None"
    LEFT = "InverseSqrtLeft"
    RIGHT = "InverseSqrtRight"
    BOTH = "InverseSqrtBoth"


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    singularity: Singularity = Singularity.NONE

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")
        object.__setattr__(self, "singularity", Singularity(self.singularity))


def _quad(g, lo, hi, spec):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(g, lo, hi, epsabs=0.0, epsrel=spec.rel_tol, limit=spec.max_subdivisions)
        except integrate.IntegrationWarning as exc:
            raise NonConvergent(str(exc)) from exc
    if not math.isfinite(val):
        raise NonConvergent("integral is not finite")
    return val


def integrate_singular(fn: Callable[[float], float], a: float, b: float,
                       spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Integrate ``fn`` over [a, b] allowing 1/sqrt endpoint singularities.

    A singular left end is removed by x = a + s**2 (dx = 2 s ds), a singular
    right end by x = b - s**2. With both ends singular the interval is split
    at its midpoint and each half substituted at its own singular end.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    sing = spec.singularity
    if sing is Singularity.NONE:
        return _quad(fn, a, b, spec)
    if sing is Singularity.LEFT:
        return _quad(lambda s: 2 * s * fn(a + s * s), 0.0, math.sqrt(b - a), spec)
    if sing is Singularity.RIGHT:
        return _quad(lambda s: 2 * s * fn(b - s * s), 0.0, math.sqrt(b - a), spec)
    mid = 0.5 * (a + b)
    w = math.sqrt(mid - a)
    left = _quad(lambda s: 2 * s * fn(a + s * s), 0.0, w, spec)
    right = _quad(lambda s: 2 * s * fn(b - s * s), 0.0, math.sqrt(b - mid), spec)
    return left + right
