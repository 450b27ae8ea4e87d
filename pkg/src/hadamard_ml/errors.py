"""Exception hierarchy shared by every module of the package."""


class HadamardMLError(Exception):
    """Base class for all errors raised by :mod:`hadamard_ml`."""


class DomainError(HadamardMLError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NonConvergence(HadamardMLError, ArithmeticError):
    """A series or quadrature failed to reach its tolerance.

    ``partial`` carries the best available result, if any.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StepTooSmall(HadamardMLError, ArithmeticError):
    """A difference stencil cannot be placed inside the admissible region."""
