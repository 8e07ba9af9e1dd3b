"""Custom exceptions module."""


class FixpointError(Exception):
    """Base Exception."""


# Contract errors --->

class ContractViolation(FixpointError, ValueError):
    """Base Exception for violated preconditions."""


class BasePointMismatch(ContractViolation):
    """Exception raised when tangent vectors live in different tangent spaces.

    Raised if two tangents are combined whose base points differ, or if a
    tangent is used at a point it is not anchored at.
    """


class LengthMismatch(ContractViolation):
    """Exception raised for mismatched factor counts or vector lengths."""


class DomainError(ContractViolation):
    """Exception raised for a point or parameter outside its domain."""


# Numerical errors --->

class NumericalError(FixpointError):
    """Base Exception for numerical integrity errors."""


class InconsistentOracleError(NumericalError):
    """Exception raised for a zero subgradient at a point with g(x) > 0."""


class NonPositiveRateError(NumericalError):
    """Exception raised when a rate engine emits h <= 0."""


class NonFiniteError(NumericalError):
    """Exception raised when a NaN or Inf value is detected."""
