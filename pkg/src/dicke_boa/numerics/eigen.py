"""Symmetric eigensolvers: dense full-spectrum and banded windowed."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from ..errors import NoConvergence, NotSymmetric


@dataclass(frozen=True)
class EigenResult:
    """Ascending eigenvalues and (optionally) orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: Optional[np.ndarray]


def symmetric_eigensolve(H) -> EigenResult:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotSymmetric("matrix must be square")
    scale = np.max(np.abs(H)) if H.size else 0.0
    if H.size and np.max(np.abs(H - H.T)) > 1e-12 * max(scale, 1e-300):
        raise NotSymmetric("matrix is not symmetric to 1e-12 relative")
    try:
        w, v = linalg.eigh(H)
    except linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return EigenResult(w, v)


def band_matvec(ab: np.ndarray, x: np.ndarray) -> np.ndarray:
    """y = A x for symmetric A in lower band storage ab[i - j, j] = A[i, j]."""
    n = ab.shape[1]
    y = ab[0][:, None] * x if x.ndim == 2 else ab[0] * x
    for k in range(1, ab.shape[0]):
        d = ab[k, : n - k]
        if x.ndim == 2:
            d = d[:, None]
        y[k:] += d * x[: n - k]
        y[: n - k] += d * x[k:]
    return y


def _lu_storage(ab: np.ndarray, shift: float) -> np.ndarray:
    """General band storage of (A - shift) with room for LU fill-in."""
    bw = ab.shape[0] - 1
    n = ab.shape[1]
    out = np.zeros((3 * bw + 1, n))
    out[2 * bw] = ab[0] - shift
    for k in range(1, bw + 1):
        out[2 * bw - k, k:] = ab[k, : n - k]
        out[2 * bw + k, : n - k] = ab[k, : n - k]
    return out


def _inverse_iteration(ab, lam, v0, iterations, others, norm_h):
    bw = ab.shape[0] - 1
    # nudge off the exact eigenvalue so the factor stays finite
    shift = lam + 4 * np.finfo(float).eps * norm_h
    lu, piv, info = lapack.dgbtrf(_lu_storage(ab, shift), bw, bw)
    if info < 0:
        raise NoConvergence(f"dgbtrf failed with info={info}")
    if info > 0:
        shift = lam + 1e3 * np.finfo(float).eps * norm_h
        lu, piv, info = lapack.dgbtrf(_lu_storage(ab, shift), bw, bw)
        if info != 0:
            raise NoConvergence(f"dgbtrf failed with info={info}")
    v = v0 / np.linalg.norm(v0)
    for _ in range(iterations):
        x, info = lapack.dgbtrs(lu, bw, bw, v, piv)
        if info != 0:
            raise NoConvergence(f"dgbtrs failed with info={info}")
        for u in others:
            x -= (u @ x) * u
        v = x / np.linalg.norm(x)
    return v


def banded_eigensolve(ab, *, select: str = "a", select_range=None, vectors: bool = True,
                      iterations: int = 3, cluster_tol: float = 1e-7, seed: int = 0) -> EigenResult:
    """Eigenpairs of a symmetric band matrix in lower storage.

    Eigenvalues come from the LAPACK band driver without forming the
    transformation matrix. Eigenvectors, when requested, are obtained by
    shifted inverse iteration on a band LU factorization, with
    reorthogonalization and a Rayleigh-Ritz rotation inside clusters whose
    spacing is below ``cluster_tol * ||A||``. ``select``/``select_range``
    follow :func:`scipy.linalg.eig_banded`.
    """
    ab = np.ascontiguousarray(ab, dtype=float)
    n = ab.shape[1]
    try:
        if select == "a":
            w = linalg.eig_banded(ab, lower=True, eigvals_only=True)
        else:
            w = linalg.eig_banded(ab, lower=True, eigvals_only=True, select=select,
                                  select_range=select_range)
    except linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    w = np.sort(np.asarray(w, dtype=float))
    if not vectors:
        return EigenResult(w, None)
    norm_h = max(np.max(np.abs(ab[0])) + 2 * np.sum(np.max(np.abs(ab[1:]), axis=1)), 1e-300)
    rng = np.random.default_rng(seed)
    V = np.empty((n, w.size))
    start = 0
    while start < w.size:
        stop = start + 1
        while stop < w.size and w[stop] - w[stop - 1] < cluster_tol * norm_h:
            stop += 1
        members = []
        for k in range(start, stop):
            v = _inverse_iteration(ab, w[k], rng.standard_normal(n), iterations, members, norm_h)
            members.append(v)
        block = np.array(members).T
        if stop - start > 1:
            block, _ = np.linalg.qr(block)
            small = block.T @ band_matvec(ab, block)
            sw, sv = np.linalg.eigh(0.5 * (small + small.T))
            block = block @ sv
            w[start:stop] = sw
        V[:, start:stop] = block
        start = stop
    resid = np.linalg.norm(band_matvec(ab, V) - V * w, axis=0) if w.size else np.zeros(0)
    bad = resid > 1e-9 * norm_h
    if np.any(bad):
        raise NoConvergence(f"{int(bad.sum())} eigenpairs failed the residual test")
    return EigenResult(w, V)
