"""Requantized band spectra."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BandSpectrum:
    """Levels of one adiabatic band.

    ``label`` is the band quantum number (m' or n'), ``index`` the level
    number inside the band and ``degeneracy`` 2 for parity doublets that the
    approximation cannot split, else 1.
    """

    kind: str
    label: float
    index: np.ndarray
    energies: np.ndarray
    degeneracy: np.ndarray

    def expanded(self) -> np.ndarray:
        """Energies with doublets repeated, ascending."""
        return np.sort(np.repeat(self.energies, self.degeneracy))

    def __len__(self):
        return self.energies.size
