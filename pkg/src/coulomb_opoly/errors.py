"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so every failure raised from library
code is one of the classes below.
"""


class CoulombOpolyError(Exception):
    """Base class for library errors."""


class InvalidInputError(CoulombOpolyError, ValueError):
    """Malformed or non-finite input (NaN/Inf entries, bad tolerances)."""


class ParameterDomainError(CoulombOpolyError, ValueError):
    """Parameters outside the admissible range (e.g. L <= -3/2, Gamma poles)."""


class ConvergenceError(CoulombOpolyError, ArithmeticError):
    """A series or truncation did not reach the requested tolerance.

    Attributes
    ----------
    best_bound : float
        Smallest error bound that was achieved before giving up.
    """

    def __init__(self, message, best_bound=float("nan")):
        super().__init__(message)
        self.best_bound = best_bound


class PrecisionLossError(ConvergenceError):
    """Result dominated by rounding (cancellation in a power series)."""


class SeedingError(ConvergenceError):
    """No sign change could be bracketed around a truncated-matrix seed."""


class PoleProximityError(CoulombOpolyError, ArithmeticError):
    """Evaluation point lies within numerical noise of a pole."""
