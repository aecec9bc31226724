"""Exact spectra, Born-Oppenheimer bands and classical dynamics of the Dicke model."""
from .model import (
    ModelParams,
    Phase,
    Regime,
    RegimeVerdict,
    classify_regime,
    derived_scales,
    phase_of,
    quadratic_frequencies,
)
from .quantum import (
    FockSpinBasis,
    Observable,
    SpectralDecomposition,
    build_hamiltonian,
    build_observable,
    converge_and_diagonalize,
    converge_lowest,
    converge_truncation,
    diagonalize_parity,
    peres_lattice,
)
from .bands import BandSpectrum
from . import boson, classical, pseudospin

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "Phase",
    "Regime",
    "RegimeVerdict",
    "classify_regime",
    "derived_scales",
    "phase_of",
    "quadratic_frequencies",
    "FockSpinBasis",
    "Observable",
    "SpectralDecomposition",
    "build_hamiltonian",
    "build_observable",
    "converge_and_diagonalize",
    "converge_lowest",
    "converge_truncation",
    "diagonalize_parity",
    "peres_lattice",
    "BandSpectrum",
    "boson",
    "classical",
    "pseudospin",
]
