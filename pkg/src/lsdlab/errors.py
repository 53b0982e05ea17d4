"""Exception hierarchy shared by every module.

The CLI maps :class:`NumericValidationError` and its subclasses to exit code 3.
"""


class LsdError(Exception):
    """Base class for all library errors."""


class DomainError(LsdError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DomainError):
    """A parameter (usually k) lies outside the validity range of an approximation."""


class CapacityError(LsdError):
    """A requested size exceeds a configured memory or time bound."""


class NotFoundError(LsdError):
    """A bounded search finished without finding what it was looking for."""


class NumericValidationError(LsdError, ArithmeticError):
    """A numerical self-check failed."""


class BranchError(NumericValidationError):
    """Continuation of a logarithm could not be tracked unambiguously."""


class ContinuationError(NumericValidationError):
    """An L-value vanished (numerically) on a continuation path."""


class ExtractionError(NumericValidationError):
    """A contour coefficient did not converge or a winding was detected."""
