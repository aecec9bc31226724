"""Merged requantized spectra built from the individual BOA bands."""
from __future__ import annotations

import math

import numpy as np

from . import boson, pseudospin
from .errors import DomainError
from .model import ModelParams


def pseudospin_ladder(params: ModelParams, count: int,
                      convention=pseudospin.Quantization.HALF_INTEGER) -> np.ndarray:
    """Lowest ``count`` Bohr-Sommerfeld levels over all m' bands, sorted.

    Bands are added from m' = -j upward until the next band minimum lies
    above the current ``count``-th level.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    j = params.j
    levels: list[float] = []
    m = -j
    while m <= j + 1e-12:
        e_min = pseudospin.band_minimum(m, params).e_min
        if len(levels) >= count and e_min > np.sort(levels)[count - 1]:
            break
        levels.extend(pseudospin.bohr_sommerfeld_levels(m, params, count, convention).expanded())
        m += 1
    return np.sort(levels)[:count]


def boson_ladder(params: ModelParams, e_max: float):
    """LMG-requantized levels up to ``e_max``.

    Returns (energies, parity, n_prime) sorted by energy. The parity of a
    level is (-1)**n' times the spin parity of its LMG eigenvector.
    """
    j = params.j
    ev, vec = np.linalg.eigh(boson.lmg_matrix(params))
    m = np.arange(round(2 * j) + 1)
    spin_par = np.where(((vec**2) * ((-1.0) ** m)[:, None]).sum(axis=0) > 0, 1, -1)
    n_top = max(0, math.floor((e_max - ev[0]) / params.omega))
    E, P, N = [], [], []
    for n in range(n_top + 1):
        E.append(ev + params.omega * n)
        P.append(spin_par * (-1) ** n)
        N.append(np.full(ev.size, n))
    E, P, N = np.concatenate(E), np.concatenate(P), np.concatenate(N)
    keep = E <= e_max
    order = np.argsort(E[keep], kind="stable")
    return E[keep][order], P[keep][order], N[keep][order]
