"""Exception hierarchy for the desinv package.

Everything raised on purpose derives from StatError, which itself derives
from ValueError so that casual callers can catch one thing.
"""


class StatError(ValueError):
    """Base class for all errors raised deliberately by this package."""


class InputError(StatError):
    """Malformed, out-of-range, or empty input data."""


class DomainError(StatError):
    """A requested quantity is mathematically undefined for these parameters."""


class CapacityError(StatError):
    """An exhaustive computation would exceed its size guard."""


class PreconditionError(StatError):
    """A stated precondition of a bound or check does not hold."""


class DegenerateError(StatError):
    """The distribution involved is almost surely constant."""


class ValidationError(StatError):
    """Derived data (tables, reports) is internally inconsistent."""
