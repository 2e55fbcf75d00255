"""Exception hierarchy shared across the library."""


class LownerJohnError(Exception):
    """Base class for all library errors."""


class ArgumentError(LownerJohnError, ValueError):
    """Malformed argument (wrong dimension, out-of-range scalar, ...)."""


class DimensionMismatchError(ArgumentError):
    """Vector or matrix dimension does not match the function's dimension."""


class InvariantError(LownerJohnError):
    """A declared type invariant failed to hold."""


class EmptyLevelSetError(LownerJohnError):
    """Requested super-level set is empty (s exceeds the sup of f)."""


class CenterOutsideError(LownerJohnError):
    """A required center point is not in the interior of the relevant set."""


class ConvexityError(LownerJohnError):
    """Input data violates convexity beyond the configured tolerance."""


class DegeneracyError(LownerJohnError):
    """Geometric input is degenerate (zero inradius, unbounded, rank-deficient)."""


class ConvergenceError(LownerJohnError):
    """An iterative solve did not converge within its iteration budget.

    The last iterate, when available, is attached as ``last_iterate``.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class BracketError(LownerJohnError):
    """A scalar root/extremum search could not bracket a solution."""


class DomainError(LownerJohnError):
    """Evaluation requested outside the mathematical domain of a formula."""


class SearchRegionError(LownerJohnError):
    """The center search hit its region boundary even after enlargement."""


class ConfigError(LownerJohnError):
    """Invalid or unparseable run configuration."""
