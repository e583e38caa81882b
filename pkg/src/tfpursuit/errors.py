"""Exception types shared across the package."""


class PursuitError(Exception):
    """Base class for all tfpursuit errors."""


class RankDeficient(PursuitError):
    """A matrix that must have full column rank does not."""


class InvalidParameter(PursuitError, ValueError):
    """An argument is outside its documented domain."""


class InvalidDimension(PursuitError, ValueError):
    """A dimension argument is structurally invalid (e.g. not a power of two)."""


class DimensionMismatch(PursuitError, ValueError):
    """Two arguments have incompatible shapes."""


class TooLarge(PursuitError):
    """An exhaustive enumeration would exceed the hard instance-size bound."""


class EmptyTrace(PursuitError):
    """A pursuit trace has no usable iterations for the requested statistic."""


class ConfigError(PursuitError):
    """An experiment configuration file is malformed or inconsistent."""
