"""Exception hierarchy shared by every module of the package."""


class DickeError(Exception):
    """Base class for all errors raised by dicke_boa."""


class CriticalCoupling(DickeError, ValueError):
    """Raised for quantities that are undefined at gamma == gamma_c."""


class DomainError(DickeError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NonConvergent(DickeError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""


class NoBracket(DickeError, ValueError):
    """Root finder called with an interval that does not bracket a root."""


class NotSymmetric(DickeError, ValueError):
    """Matrix handed to a symmetric eigensolver is not symmetric."""


class NoConvergence(DickeError, ArithmeticError):
    """Eigensolver failed to converge."""


class TooFewSamples(DickeError, ValueError):
    """Time series too short for spectral peak extraction."""


class BudgetExceeded(DickeError, RuntimeError):
    """Fock truncation could not be certified within the n_max budget.

    The best basis reached is kept on ``best_basis``.
    """

    def __init__(self, message, best_basis=None):
        super().__init__(message)
        self.best_basis = best_basis


class FlatMinimum(DickeError, ValueError):
    """Band head where the slow frequency vanishes (m' = -j/f**2)."""


class BelowBandMinimum(DickeError, ValueError):
    """Energy below the minimum of the requested band."""


class BarrierTop(DickeError, ValueError):
    """Energy sits on the log-divergent barrier top of a double well."""


class NonMonotoneAction(DickeError, ArithmeticError):
    """Action integral failed to increase with energy."""


class OutOfBand(DickeError, ValueError):
    """Energy outside the finite range of a fast-boson band."""


class ESQPTDivergence(DickeError, ValueError):
    """Energy on the logarithmic singularity at eps = -1."""


class EnergyDriftExceeded(DickeError, ArithmeticError):
    """Trajectory lost energy conservation beyond the allowed drift."""


class InvalidTrajectory(DickeError, ValueError):
    """Operation requires a trajectory that passed its drift checks."""


class OutOfRange(DickeError, ValueError):
    """Band label outside [-j, j]."""


class ConfigInvalid(DickeError, ValueError):
    """Run configuration failed validation."""


class NumericFailure(DickeError, RuntimeError):
    """A numerical stage failed inside a CLI command."""
