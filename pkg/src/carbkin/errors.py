"""Exception types shared across the package."""


class CarbkinError(Exception):
    """Base class for all carbkin-specific errors."""


class ConvergenceError(CarbkinError):
    """An iterative solve failed to reach its tolerance.

    Carries the final residual so callers can report how far off the
    solve ended up.
    """

    def __init__(self, message, residual=None):
        if residual is not None:
            message = f"{message} (final residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class FileFormatError(CarbkinError):
    """A database, config, model, or CSV file violates its schema.

    ``context`` identifies the offending file/field/row.
    """

    def __init__(self, message, context=None):
        if context:
            message = f"{context}: {message}"
        super().__init__(message)
        self.context = context


class IntegrationError(CarbkinError):
    """Time integration aborted; ``last_time``/``last_state`` hold the
    last accepted point."""

    def __init__(self, message, last_time=None, last_state=None):
        super().__init__(message)
        self.last_time = last_time
        self.last_state = last_state


class SaturationNotReached(CarbkinError):
    """A trajectory never reached the requested saturation threshold."""

    def __init__(self, threshold, max_omega):
        super().__init__(
            f"saturation threshold {threshold} never reached "
            f"(maximum omega along the series: {max_omega:.6g})"
        )
        self.threshold = threshold
        self.max_omega = max_omega
