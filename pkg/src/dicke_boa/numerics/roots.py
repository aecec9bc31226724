"""Bracketed scalar root finding."""
from __future__ import annotations

import math
from typing import Callable

from ..errors import NoBracket


def find_root(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
              max_iter: int = 200) -> float:
    """Root of ``fn`` in [lo, hi] by a safeguarded secant/bisection hybrid.

    The secant (regula falsi with Illinois weighting) step is taken when it
    lands strictly inside the bracket and shrinks it fast enough; otherwise
    the bracket is bisected. Stops once the bracket is narrower than ``tol``
    or an exact zero is hit.
    """
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or (flo > 0) == (fhi > 0):
        raise NoBracket(f"f({lo})={flo} and f({hi})={fhi} do not bracket a root")
    a, b, fa, fb = lo, hi, flo, fhi
    for _ in range(max_iter):
        width = abs(b - a)
        if width <= tol:
            break
        x = (a * fb - b * fa) / (fb - fa) if fb != fa else math.nan
        if not (min(a, b) < x < max(a, b)):
            x = 0.5 * (a + b)
        fx = fn(x)
        if fx == 0:
            return x
        if (fx > 0) != (fb > 0):
            a, fa = b, fb
        else:
            fa = fa / 2  # Illinois down-weighting of the stale end
        b, fb = x, fx
        if abs(b - a) > 0.5 * width:
            m = 0.5 * (a + b)
            fm = fn(m)
            if fm == 0:
                return m
            if (fm > 0) != (fb > 0):
                a, fa = m, fm
            else:
                b, fb = m, fm
    return b
