"""Exception hierarchy shared by every module."""


class FisherBoundError(Exception):
    """Base class for all package errors."""


class DomainError(FisherBoundError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParameterError(FisherBoundError, ValueError):
    """A family parameter (beta, gamma, ...) is out of its admissible range."""


class SingularStateError(DomainError):
    """A faithful (strictly positive) state was required."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class InternalConsistencyError(FisherBoundError, ArithmeticError):
    """Two independent computations of the same quantity disagree."""
