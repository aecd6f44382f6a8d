"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when a physical parameter or argument is out of its domain."""


class NoDecoherenceError(InvalidInputError):
    """Raised when a decoherence time is requested but the factor never decays."""


class DomainError(InvalidInputError):
    """Raised when a grid is too small to hold a wave packet.

    ``suggestion`` carries bounds (or a point count) that would work.
    """

    def __init__(self, message, suggestion=None):
        super().__init__(message)
        self.suggestion = suggestion


class ConvergenceError(RuntimeError):
    """Raised when step doubling fails to converge; keeps both last estimates."""

    def __init__(self, message, coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class ConfigError(InvalidInputError):
    """Invalid experiment configuration, tagged with the offending field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
