"""Exact Dicke Hamiltonian in a truncated Fock x spin basis.

Basis states |n, m> are indexed k = n (2j+1) + (m + j), so every operator
is a Kronecker product boson (x) spin. Parity (-1)**(n + m + j) commutes with
H; reordering each parity sector boson-major gives a band matrix whose
half-bandwidth is about j + 1, which is what makes large Fock cutoffs
tractable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal

from .errors import BudgetExceeded, DomainError
from .model import ModelParams
from .numerics.eigen import banded_eigensolve, symmetric_eigensolve

DEGENERACY_TOL = 1e-10
TAIL_COMPONENTS = 4
TAIL_WEIGHT_TOL = 1e-8


@dataclass(frozen=True)
class FockSpinBasis:
    n_max: int
    j: float

    def __post_init__(self):
        if self.n_max < 0:
            raise DomainError("n_max must be non-negative")
        two_j = 2 * self.j
        if two_j < 1 or abs(two_j - round(two_j)) > 1e-12:
            raise DomainError("2j must be a positive integer")

    @property
    def spin_dim(self) -> int:
        return round(2 * self.j) + 1

    @property
    def boson_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.boson_dim * self.spin_dim

    def index(self, n: int, m: float) -> int:
        mi = round(m + self.j)
        if not (0 <= n <= self.n_max and 0 <= mi < self.spin_dim and abs(m + self.j - mi) < 1e-9):
            raise DomainError(f"(n={n}, m={m}) outside the basis")
        return n * self.spin_dim + mi

    def state(self, k: int) -> tuple[int, float]:
        if not 0 <= k < self.dim:
            raise DomainError(f"index {k} outside the basis")
        n, mi = divmod(k, self.spin_dim)
        return n, mi - self.j

    def labels(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays (n, m) over all basis indices."""
        k = np.arange(self.dim)
        return k // self.spin_dim, (k % self.spin_dim) - self.j

    def parity(self) -> np.ndarray:
        n, m = self.labels()
        return np.where(np.rint(n + m + self.j).astype(np.int64) % 2 == 0, 1, -1)


def _coupling_entries(params: ModelParams, basis: FockSpinBasis):
    """Upper-triangle coupling elements as (row, col, value) arrays."""
    j, ns = basis.j, basis.spin_dim
    g = math.sqrt(2) * params.gamma / math.sqrt(j)
    n = np.arange(basis.n_max)
    m = np.arange(ns) - j
    rows, cols, vals = [], [], []
    for dm in (1, -1):
        mm = m[(m + dm >= -j - 1e-9) & (m + dm <= j + 1e-9)]
        ladder = 0.5 * np.sqrt(j * (j + 1) - mm * (mm + dm))
        nn, mg = np.meshgrid(n, mm, indexing="ij")
        val = g * np.sqrt(nn + 1) * np.broadcast_to(ladder, nn.shape)
        rows.append((nn * ns + np.rint(mg + j)).ravel())
        cols.append(((nn + 1) * ns + np.rint(mg + dm + j)).ravel())
        vals.append(val.ravel())
    return (np.concatenate(rows).astype(np.int64), np.concatenate(cols).astype(np.int64),
            np.concatenate(vals))


def _diagonal(params: ModelParams, basis: FockSpinBasis) -> np.ndarray:
    n, m = basis.labels()
    return (params.omega * n + params.omega0 * m).astype(float)


def build_hamiltonian_sparse(params: ModelParams, basis: FockSpinBasis) -> sparse.csr_matrix:
    r, c, v = _coupling_entries(params, basis)
    d = _diagonal(params, basis)
    k = np.arange(basis.dim)
    rows = np.concatenate([k, r, c])
    cols = np.concatenate([k, c, r])
    data = np.concatenate([d, v, v])
    return sparse.csr_matrix((data, (rows, cols)), shape=(basis.dim, basis.dim))


def build_hamiltonian(params: ModelParams, basis: FockSpinBasis) -> np.ndarray:
    """Dense symmetric Hamiltonian matrix."""
    if abs(params.j - basis.j) > 1e-12:
        raise DomainError("basis and parameters disagree on j")
    H = np.diag(_diagonal(params, basis))
    r, c, v = _coupling_entries(params, basis)
    H[r, c] = v
    H[c, r] = v
    return H


@dataclass(frozen=True)
class ParityBlock:
    """One parity sector in lower band storage; ``indices`` map to the full basis."""

    parity: int
    indices: np.ndarray
    band: np.ndarray


def parity_blocks(params: ModelParams, basis: FockSpinBasis) -> list[ParityBlock]:
    if abs(params.j - basis.j) > 1e-12:
        raise DomainError("basis and parameters disagree on j")
    par = basis.parity()
    d = _diagonal(params, basis)
    r, c, v = _coupling_entries(params, basis)
    blocks = []
    for p in (1, -1):
        idx = np.flatnonzero(par == p)
        pos = np.full(basis.dim, -1, dtype=np.int64)
        pos[idx] = np.arange(idx.size)
        sel = pos[r] >= 0
        pr, pc, pv = pos[r[sel]], pos[c[sel]], v[sel]
        lo, hi = np.minimum(pr, pc), np.maximum(pr, pc)
        bw = int(np.max(hi - lo)) if pv.size else 0
        band = np.zeros((bw + 1, idx.size))
        band[0] = d[idx]
        band[hi - lo, lo] = pv
        blocks.append(ParityBlock(p, idx, band))
    return blocks


@dataclass
class SpectralDecomposition:
    energies: np.ndarray
    states: Optional[np.ndarray]
    parity: np.ndarray
    basis: FockSpinBasis
    converged_count: int = 0
    params: Optional[ModelParams] = field(default=None, compare=False)

    def __len__(self):
        return self.energies.size


def _rotate_degenerate_to_parity(w, V, par_diag):
    k = 0
    while k < w.size:
        stop = k + 1
        while stop < w.size and w[stop] - w[stop - 1] < DEGENERACY_TOL * max(1.0, abs(w[k])):
            stop += 1
        if stop - k > 1:
            blk = V[:, k:stop]
            pw, pv = np.linalg.eigh(blk.T @ (par_diag[:, None] * blk))
            V[:, k:stop] = blk @ pv
        k = stop
    return V


def diagonalize(H, basis: FockSpinBasis, converged_count: Optional[int] = None) -> SpectralDecomposition:
    """Full dense diagonalization with parity labels from <Pi>."""
    res = symmetric_eigensolve(H)
    par_diag = basis.parity().astype(float)
    V = _rotate_degenerate_to_parity(res.values, res.vectors.copy(), par_diag)
    parity = np.einsum("ik,i,ik->k", V, par_diag, V)
    count = res.values.size if converged_count is None else converged_count
    return SpectralDecomposition(res.values, V, np.sign(parity).astype(int), basis, count)


def diagonalize_parity(params: ModelParams, basis: FockSpinBasis, *, energy_window=None,
                       count: Optional[int] = None, vectors: bool = True) -> SpectralDecomposition:
    """Windowed diagonalization sector by sector on the band representation.

    Either ``energy_window=(lo, hi)`` or ``count`` (lowest states of each
    parity) selects the states; with neither the full spectrum is returned.
    """
    energies, parities, cols = [], [], []
    for blk in parity_blocks(params, basis):
        if energy_window is not None:
            res = banded_eigensolve(blk.band, select="v", select_range=tuple(energy_window), vectors=vectors)
        elif count is not None:
            top = min(count, blk.indices.size) - 1
            res = banded_eigensolve(blk.band, select="i", select_range=(0, top), vectors=vectors)
        else:
            res = banded_eigensolve(blk.band, vectors=vectors)
        energies.append(res.values)
        parities.append(np.full(res.values.size, blk.parity))
        if vectors:
            full = np.zeros((basis.dim, res.values.size))
            full[blk.indices] = res.vectors
            cols.append(full)
    E = np.concatenate(energies)
    order = np.argsort(E, kind="stable")
    states = np.concatenate(cols, axis=1)[:, order] if vectors else None
    return SpectralDecomposition(E[order], states, np.concatenate(parities)[order], basis, E.size, params)


def _tail_weight(states: np.ndarray, basis: FockSpinBasis) -> np.ndarray:
    top = TAIL_COMPONENTS * basis.spin_dim
    return np.sum(states[-top:] ** 2, axis=0)


def converge_and_diagonalize(params: ModelParams, energy_window, tol: Optional[float] = None,
                             n_start: int = 32, n_budget: int = 4096):
    """Smallest doubled cutoff certified for the window, with its decomposition.

    A cutoff n is accepted when every window eigenvalue moves by less than
    ``tol`` (default 1e-8 omega0) on doubling n and the four highest Fock
    levels carry total weight below 1e-8 in every window eigenvector.
    """
    lo, hi = energy_window
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError("energy window must be finite and ordered")
    tol = 1e-8 * params.omega0 if tol is None else tol
    n = min(n_start, n_budget)
    best = None
    # guard band so states drifting across the window edges are still matched
    pad = 10 * tol
    while n <= n_budget:
        basis = FockSpinBasis(n, params.j)
        dec = diagonalize_parity(params, basis, energy_window=(lo - pad, hi + pad))
        best = basis
        if 2 * n > n_budget:
            break
        finer = diagonalize_parity(params, FockSpinBasis(2 * n, params.j),
                                   energy_window=(lo - pad, hi + pad), vectors=False)
        ok = _window_match(dec, finer, lo, hi, tol)
        tail_ok = dec.energies.size == 0 or np.all(_tail_weight(dec.states, basis) < TAIL_WEIGHT_TOL)
        if ok and tail_ok:
            inside = (dec.energies >= lo) & (dec.energies <= hi)
            dec.converged_count = int(inside.sum())
            return basis, dec
        n *= 2
    raise BudgetExceeded(f"truncation not certified within n_max <= {n_budget}", best_basis=best)


def _window_match(coarse: SpectralDecomposition, fine: SpectralDecomposition, lo, hi, tol) -> bool:
    # edges widened by tol so levels sitting on an edge count on both sides
    for p in (1, -1):
        a = coarse.energies[coarse.parity == p]
        b = fine.energies[fine.parity == p]
        a_in = a[(a >= lo - tol) & (a <= hi + tol)]
        b_in = b[(b >= lo - tol) & (b <= hi + tol)]
        if a_in.size != b_in.size:
            return False
        if a_in.size and np.max(np.abs(a_in - b_in)) >= tol:
            return False
    return True


def converge_truncation(params: ModelParams, energy_window, tol: Optional[float] = None,
                        n_start: int = 32, n_budget: int = 4096) -> FockSpinBasis:
    return converge_and_diagonalize(params, energy_window, tol, n_start, n_budget)[0]


def converge_lowest(params: ModelParams, count: int, tol: Optional[float] = None, n_start: int = 32,
                    n_budget: int = 4096, vectors: bool = False):
    """Certified cutoff for the ``count`` lowest states of each parity.

    Same doubling protocol as :func:`converge_and_diagonalize` with the
    window given by state indices instead of energies.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    tol = 1e-8 * params.omega0 if tol is None else tol
    n = min(n_start, n_budget)
    best = None
    while n <= n_budget:
        basis = FockSpinBasis(n, params.j)
        dec = diagonalize_parity(params, basis, count=count, vectors=True)
        best = basis
        if 2 * n > n_budget:
            break
        finer = diagonalize_parity(params, FockSpinBasis(2 * n, params.j), count=count, vectors=False)
        shift_ok = all(
            np.max(np.abs(dec.energies[dec.parity == p] - finer.energies[finer.parity == p])) < tol
            for p in (1, -1))
        if shift_ok and np.all(_tail_weight(dec.states, basis) < TAIL_WEIGHT_TOL):
            if not vectors:
                dec.states = None
            return basis, dec
        n *= 2
    raise BudgetExceeded(f"truncation not certified within n_max <= {n_budget}", best_basis=best)


class Observable(str, Enum):
    JZ = "Jz"
    PHOTON_NUMBER = "PhotonNumber"
    JZ_PRIME = "JzPrime"
    SHIFTED_NUMBER = "ShiftedNumber"


def spin_matrices(j: float):
    """(Jx, Jy_imag, Jz) with Jy = i * Jy_imag kept real; basis m = -j..j."""
    m = np.arange(round(2 * j) + 1) - j
    up = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp = np.diag(up, -1)  # <m+1|J+|m>
    jx = 0.5 * (jp + jp.T)
    jy_imag = -0.5 * (jp - jp.T)
    return jx, jy_imag, np.diag(m)


def boson_matrices(n_max: int):
    """(a + a^dagger, a^dagger a) as sparse matrices."""
    off = np.sqrt(np.arange(1, n_max + 1, dtype=float))
    x = sparse.diags([off, off], [-1, 1], format="csr")
    num = sparse.diags(np.arange(n_max + 1, dtype=float), 0, format="csr")
    return x, num


class KronOperator:
    """Symmetric operator sum_i A_i (x) B_i on the Fock x spin space.

    Applied without forming the full matrix: with a state reshaped to X of
    shape (boson_dim, spin_dim), (A (x) B) x = A X B^T.
    """

    def __init__(self, terms: Sequence, basis: FockSpinBasis, tag: Observable):
        self.terms = list(terms)
        self.basis = basis
        self.tag = tag

    def matvec(self, v: np.ndarray) -> np.ndarray:
        nb, ns = self.basis.boson_dim, self.basis.spin_dim
        single = v.ndim == 1
        V = v.reshape(nb, ns, -1)
        out = np.zeros_like(V)
        for A, B in self.terms:
            T = np.einsum("st,btk->bsk", B, V)
            if sparse.issparse(A):
                out += (A @ T.reshape(nb, -1)).reshape(nb, ns, -1)
            else:
                out += np.tensordot(A, T, axes=(1, 0))
        out = out.reshape(self.basis.dim, -1)
        return out[:, 0] if single else out

    def toarray(self) -> np.ndarray:
        total = np.zeros((self.basis.dim, self.basis.dim))
        for A, B in self.terms:
            Ad = A.toarray() if sparse.issparse(A) else A
            total += np.kron(Ad, B)
        return total

    def __matmul__(self, v):
        return self.matvec(v)


def quadrature_functions(params: ModelParams, basis: FockSpinBasis):
    """Truncated cos(beta(Q)) and sin(beta(Q)) by spectral decomposition of Q."""
    nb = basis.boson_dim
    off = np.sqrt(np.arange(1, nb, dtype=float) / 2)
    q, U = eigh_tridiagonal(np.zeros(nb), off)
    b = params.coupling
    wp = np.sqrt(params.omega0**2 + (b * q) ** 2)
    C = (U * (params.omega0 / wp)) @ U.T
    S = (U * (b * q / wp)) @ U.T
    return 0.5 * (C + C.T), 0.5 * (S + S.T)


def build_observable(tag, params: ModelParams, basis: FockSpinBasis) -> KronOperator:
    tag = Observable(tag)
    jx, _, jz = spin_matrices(basis.j)
    x, num = boson_matrices(basis.n_max)
    eye_b = sparse.identity(basis.boson_dim, format="csr")
    eye_s = np.eye(basis.spin_dim)
    if tag is Observable.JZ:
        terms = [(eye_b, jz)]
    elif tag is Observable.PHOTON_NUMBER:
        terms = [(num, eye_s)]
    elif tag is Observable.JZ_PRIME:
        if params.gamma == 0:
            terms = [(eye_b, jz)]
        else:
            C, S = quadrature_functions(params, basis)
            terms = [(C, jz), (S, jx)]
    else:
        w, g, j = params.omega, params.gamma, basis.j
        terms = [(num, eye_s)]
        if g != 0:
            terms.append((eye_b, (2 * g * g / (j * w * w)) * (jx @ jx)))
            terms.append((math.sqrt(2 / j) * (g / w) * x, jx))
    return KronOperator(terms, basis, tag)


def parity_operator(basis: FockSpinBasis) -> np.ndarray:
    return np.diag(basis.parity().astype(float))


@dataclass(frozen=True)
class PeresLattice:
    energies: np.ndarray
    expval: np.ndarray
    uncert: np.ndarray
    parity: np.ndarray
    tag: Observable
    raw_variance: np.ndarray


def expectation_and_uncertainty(states: np.ndarray, op) -> tuple[np.ndarray, np.ndarray]:
    """<O> and <O^2> - <O>^2 per column, for symmetric O."""
    y = op.matvec(states) if isinstance(op, KronOperator) else np.asarray(op) @ states
    mean = np.einsum("ik,ik->k", states, y)
    second = np.einsum("ik,ik->k", y, y)
    return mean, second - mean**2


def peres_lattice(spec: SpectralDecomposition, op, tag=None) -> PeresLattice:
    mean, var = expectation_and_uncertainty(spec.states, op)
    tag = Observable(tag) if tag is not None else getattr(op, "tag", Observable.JZ)
    order = np.argsort(spec.energies, kind="stable")
    return PeresLattice(spec.energies[order], mean[order], np.sqrt(np.maximum(var, 0))[order],
                        spec.parity[order], tag, var[order])
