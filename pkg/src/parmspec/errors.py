"""Exception hierarchy.

Input/configuration problems derive from :class:`InputError`; everything that
goes wrong while computing derives from :class:`NumericalError`. The CLI maps
the two branches to different exit codes.
"""

from __future__ import annotations


class SpectralError(Exception):
    """Base class for all errors raised by parmspec."""


class InputError(SpectralError, ValueError):
    """Bad arguments, malformed problem data, unsupported options."""


class ConfigurationError(InputError):
    """Unknown polynomial family or invalid option."""


class InsufficientCoefficientsError(InputError):
    """A recurrence table is too short for the requested order."""


class UnsupportedFormError(InputError):
    """An operation needs polynomial data but got a general evaluator."""


class InsufficientDataError(InputError):
    """Too few usable points to fit a convergence rate."""


class PoleInsideDomainError(InputError):
    """A singularity lies on the parameter interval itself."""


class NumericalError(SpectralError, ArithmeticError):
    """A computation failed to produce a trustworthy result."""


class ConvergenceError(NumericalError):
    """The tridiagonal eigensolver ran out of iterations."""

    def __init__(self, message: str, *, index: int, iterations: int, offdiag: float):
        super().__init__(message)
        self.index = index
        self.iterations = iterations
        self.offdiag = offdiag


class SingularSystemError(NumericalError):
    """A linear system is singular to working precision."""

    def __init__(self, message: str, *, rcond: float | None = None):
        super().__init__(message)
        self.rcond = rcond


class NodeSolveError(SingularSystemError):
    """The collocation solve at one quadrature node failed."""

    def __init__(self, message: str, *, index: int, node: float, rcond: float | None = None):
        super().__init__(message, rcond=rcond)
        self.index = index
        self.node = node


class EvaluationError(NumericalError):
    """A user-supplied evaluator raised while being sampled at a node."""

    def __init__(self, message: str, *, index: int, node: float):
        super().__init__(message)
        self.index = index
        self.node = node
