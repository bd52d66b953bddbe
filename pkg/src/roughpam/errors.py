"""Exception types shared across the package."""


class RoughPamError(Exception):
    """Base class for all package errors."""


class ConfigError(RoughPamError):
    """Invalid or unparseable run configuration (CLI exit code 2)."""


class QuadratureError(RoughPamError):
    """A quadrature did not reach the requested tolerance.

    Carries the best available value and the achieved error estimate so
    callers can report how far off the evaluation was.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class DivergentIntegralError(RoughPamError):
    """An improper integral was detected to diverge."""

    def __init__(self, message, partial=None, upper_limit=None):
        super().__init__(message)
        self.partial = partial
        self.upper_limit = upper_limit


class GridMismatchError(RoughPamError):
    """Operands live on different spectral grids."""


class SolverInstabilityError(RoughPamError):
    """A trajectory blew past the stability threshold."""

    def __init__(self, message, time=None, v_norm=None):
        super().__init__(message)
        self.time = time
        self.v_norm = v_norm


class FlaggedEstimateError(RoughPamError):
    """A Monte Carlo estimate was invalidated by its own diagnostics
    (CLI exit code 3)."""


class IntegrityError(RoughPamError):
    """Results-store fingerprint collision with differing payload
    (CLI exit code 4)."""


class InsufficientDataError(RoughPamError):
    """Not enough unflagged rows to perform a fit."""
