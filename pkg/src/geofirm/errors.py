"""Exception hierarchy shared across the package."""


class GeofirmError(Exception):
    """Base class for every error raised by geofirm."""


class DomainError(GeofirmError, ValueError):
    """A point, parameter or set violates the membership rules of its space."""


class SolverError(GeofirmError, RuntimeError):
    """An inner solver or an iteration failed.

    ``iteration`` is set when the failure happened inside a fixed-point run.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class ConfigError(GeofirmError, ValueError):
    """Malformed experiment configuration; ``line`` points at the offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
