"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates a documented precondition."""


class NotMeasurable(ValueError):
    """A width or similar quantity cannot be extracted from the data."""


class FitFailed(RuntimeError):
    """Nonlinear least-squares fit did not produce a usable result.

    ``diagnostics`` carries whatever the fitter knew when it gave up
    (parameters, residual norm, iteration count, context labels).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"


class ConfigError(ValueError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key
