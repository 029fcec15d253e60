"""Exception hierarchy for kansa-collocation"""
from typing import Optional


class KansaError(Exception):
    """Base class for all errors raised by this package"""


class DomainError(KansaError, ValueError):
    """Argument outside the mathematical domain of an operation"""


class BesselOverflowError(KansaError, OverflowError):
    """K_nu(x) exceeds the representable floating-point range"""


class DimensionMismatchError(KansaError, ValueError):
    """Points or specs of incompatible dimension were combined"""


class DuplicatePointError(KansaError, ValueError):
    """A point set that must be pairwise distinct contains a repeat"""


class SamplingError(KansaError, RuntimeError):
    """Rejection sampling exhausted its proposal budget"""


class NonFiniteValueError(KansaError, ValueError):
    """A source or boundary function returned NaN or infinity"""


class SingularMatrixError(KansaError, ArithmeticError):
    """LU factorization hit a pivot below the singularity threshold"""

    def __init__(self, message: str, pivot_index: Optional[int] = None):
        super().__init__(message)
        self.pivot_index = pivot_index


class ConvergenceError(KansaError, RuntimeError):
    """An iterative decomposition did not converge"""


class AsymmetricMatrixError(KansaError, ValueError):
    """A symmetric routine received a non-symmetric matrix"""


class ConfigurationError(KansaError, ValueError):
    """Invalid or unreadable run configuration"""
