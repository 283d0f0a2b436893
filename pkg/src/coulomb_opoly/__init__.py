"""Zeros of regular Coulomb wave functions, the associated orthogonal
polynomials, and their spectral zeta function, via Jacobi matrices."""

from .errors import (
    CoulombOpolyError,
    ConvergenceError,
    InvalidInputError,
    ParameterDomainError,
    PoleProximityError,
    PrecisionLossError,
    SeedingError,
)
from .coulomb import CoulombParams

__version__ = "0.1.0"

__all__ = [
    "CoulombOpolyError",
    "ConvergenceError",
    "InvalidInputError",
    "ParameterDomainError",
    "PoleProximityError",
    "PrecisionLossError",
    "SeedingError",
    "CoulombParams",
]
