"""Exceptions raised by critnet.

Every class carries the exit code the command line reports for it.
"""


class CritnetError(Exception):
    """Base class of all critnet errors."""

    exit_code = 1


class ConfigurationError(CritnetError, ValueError):
    """Invalid configuration or unusable output location."""

    exit_code = 2


class DomainError(CritnetError, ValueError):
    """Argument outside the domain of an analytic function."""

    exit_code = 2


class SelfLoopError(CritnetError, ValueError):
    """An edge with source equal to target was requested."""

    exit_code = 2


class NoEdgesError(CritnetError, ValueError):
    """Quantity undefined on a graph without edges."""

    exit_code = 3


class NotTriggeredError(CritnetError, ValueError):
    """Avalanche requested on a solvent agent."""

    exit_code = 2


class DataError(CritnetError, ValueError):
    """Malformed input data."""

    exit_code = 3


class MissingColumnError(DataError):
    pass


class UnparseableDateError(DataError):
    pass


class NonMonotonicDatesError(DataError):
    pass


class NoVarianceError(DataError):
    """All values are equal."""


class InsufficientDataError(DataError):
    """Not enough usable points for the requested statistic."""

    exit_code = 4


class TooShortError(InsufficientDataError):
    pass
