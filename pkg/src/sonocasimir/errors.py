"""Exception types raised by the numerical core."""


class CasimirError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CasimirError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(CasimirError, ValueError):
    """Argument inside the domain but outside the supported numerical range."""


class TruncationError(CasimirError, ArithmeticError):
    """The partial-wave sum could not be truncated safely.

    ``mask``, when set, marks the points that were still unconverged.
    """

    def __init__(self, message, mask=None):
        super().__init__(message)
        self.mask = mask


class QuadratureError(CasimirError, ArithmeticError):
    """A quadrature failed to converge under panel refinement."""

    def __init__(self, message, points=()):
        super().__init__(message)
        self.points = tuple(points)


class ConsistencyError(CasimirError, ArithmeticError):
    """An internal consistency check failed (e.g. a negative spectral density)."""
