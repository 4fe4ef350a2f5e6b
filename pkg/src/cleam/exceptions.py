"""Exception types shared across the package."""


class CleamError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(CleamError, ValueError):
    """A domain object or argument violates its invariants."""


class InsufficientSamplesError(InvalidInputError):
    """Too few batch proportions for the requested statistic."""


class DegenerateClassifierError(CleamError):
    """The classifier is at chance level, so the correction denominator vanishes."""


class SingularChannelError(CleamError):
    """The classification channel matrix cannot be inverted."""


class DegenerateModelError(CleamError):
    """A zero-variance reference distribution cannot be tested against a spread sample."""


class MetricUndefinedError(CleamError):
    """A normalized error metric is undefined for the given reference value."""


class DataError(CleamError):
    """Input label data is missing, malformed, or inconsistent."""


class ConfigError(CleamError):
    """A run configuration is missing fields or contains invalid values."""
