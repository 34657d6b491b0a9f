"""Exception types shared across the package."""


class SkewflowError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SkewflowError, ValueError):
    """Inconsistent dimensions, bad parameters or malformed configuration."""


class EvaluationError(SkewflowError, ArithmeticError):
    """An observable or vector field returned a non-finite value."""


class IntegrationError(SkewflowError, RuntimeError):
    """The ODE solver failed (step-size underflow and similar)."""


class Escape(SkewflowError):
    """A trajectory left the ball of radius ``blowup_radius``.

    ``t_exit`` is the (signed) time at which the exit was detected.
    """

    def __init__(self, t_exit, message=None):
        self.t_exit = float(t_exit)
        super().__init__(message or f"trajectory escaped at t={self.t_exit:.6g}")


class ChartViolation(SkewflowError):
    """A trajectory used by a section operator escaped its chart."""


class HypothesisError(SkewflowError):
    """A structural hypothesis (invariant chart, spectral split) does not hold."""


class ContractionError(SkewflowError):
    """The section operator does not contract."""


class ConvergenceError(SkewflowError):
    """An iteration did not converge within its budget."""


class RangeError(SkewflowError, ValueError):
    """A search interval does not bracket the quantity it should."""


class ResolutionError(SkewflowError):
    """A spectral gap could not be resolved at the chosen window length."""


class FrameError(SkewflowError):
    """The block-diagonalizing frame degenerated or failed its checks."""


class GapTooSmallError(SkewflowError):
    """The graph transform diverged; the spectral gap is too small."""


class ChartError(SkewflowError):
    """A characteristic left the chart of the invariant manifold."""


class PreconditionError(SkewflowError, ValueError):
    """An input violates a documented precondition."""
