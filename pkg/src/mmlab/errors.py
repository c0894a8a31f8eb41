class InvalidArgument(ValueError):
    """Raised when an operation receives arguments outside its domain."""


class ConfigError(ValueError):
    """Raised for malformed or unknown experiment configuration."""
