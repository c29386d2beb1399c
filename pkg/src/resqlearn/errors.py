"""Exception types shared across the package."""


class ResqError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(ResqError):
    """A configuration value is out of range or inconsistent."""


class StructuralError(ResqError):
    """A structure (gate list, parameter vector, ensemble) is malformed."""


class InputError(ResqError):
    """Runtime input data violates a precondition."""
