"""Classical coherent-state dynamics."""
from .dynamics import (
    BACKEND,
    ClassicalState,
    PoincareSection,
    Trajectory,
    band_head_frequency_scan,
    band_head_initials,
    FrequencyPoint,
    energy_shell_initials,
    eom_rhs,
    hamiltonian,
    integrate,
    jzprime_classical,
    poincare_section,
    temporal_variance_jzprime,
    variance_map,
)

__all__ = [
    "BACKEND",
    "ClassicalState",
    "PoincareSection",
    "Trajectory",
    "band_head_frequency_scan",
    "band_head_initials",
    "FrequencyPoint",
    "energy_shell_initials",
    "eom_rhs",
    "hamiltonian",
    "integrate",
    "jzprime_classical",
    "poincare_section",
    "temporal_variance_jzprime",
    "variance_map",
]
