"""Exception types shared across the library."""

__all__ = [
    "DelvolError",
    "ParameterError",
    "DomainError",
    "StructuralError",
    "HypothesisError",
    "ConvergenceError",
    "EvaluationError",
]


class DelvolError(Exception):
    """Base class for all library errors."""


class ParameterError(DelvolError, ValueError):
    """A scalar argument is outside its admissible range."""


class DomainError(DelvolError, ValueError):
    """A time or window falls outside the grid."""


class StructuralError(DelvolError, ValueError):
    """Mismatched grids, shapes, or incompatible problem data."""


class HypothesisError(DelvolError, ValueError):
    """A standing hypothesis of the estimates is violated by the data."""


class ConvergenceError(DelvolError, RuntimeError):
    """An iteration or series failed to converge.

    Carries the increment history and, where meaningful, the window index
    at which the failure occurred.
    """

    def __init__(self, message, history=None, window=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []
        self.window = window


class EvaluationError(DelvolError, RuntimeError):
    """A kernel evaluation produced a non-finite value at a grid point."""

    def __init__(self, message, t=None, s=None):
        super().__init__(message)
        self.t = t
        self.s = s
