"""Domain exceptions."""


class ArcutoffError(Exception):
    """Base class for all toolkit errors."""


class ModelValidationError(ArcutoffError, ValueError):
    """A model object violates a construction invariant."""


class DimensionError(ArcutoffError, ValueError):
    """Vector or matrix dimensions do not match the network."""


class IndexOutOfRangeError(ArcutoffError, IndexError):
    """Coordinate index outside 0..d-1."""


class PreconditionError(ArcutoffError, ValueError):
    """An operation was called outside its documented domain."""


class ConvergenceError(ArcutoffError, RuntimeError):
    """A numerical result failed a sanity check and must not be used silently."""


class ConfigError(ArcutoffError, ValueError):
    """Invalid experiment or model configuration."""
