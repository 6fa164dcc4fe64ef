class CapacityError(RuntimeError):
    """Problem size exceeds what an exact or indexed representation can hold."""


class NumericError(RuntimeError):
    """An iterative solve failed to converge or produced non-finite values."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
