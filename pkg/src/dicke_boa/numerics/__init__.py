"""Shared numerical kernels."""
from .quadrature import QuadratureSpec, Singularity, integrate_singular
from .roots import find_root
from .eigen import EigenResult, symmetric_eigensolve, banded_eigensolve
from .spectral import principal_frequency

__all__ = [
    "QuadratureSpec",
    "Singularity",
    "integrate_singular",
    "find_root",
    "EigenResult",
    "symmetric_eigensolve",
    "banded_eigensolve",
    "principal_frequency",
]
