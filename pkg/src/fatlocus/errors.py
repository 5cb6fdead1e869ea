"""Exception hierarchy.

Everything raised on bad input derives from :class:`FatlocusError` (and from
``ValueError``). :class:`ConsistencyError` is different: it means a result the
theory guarantees did not hold, which always points at a bug.
"""


class FatlocusError(ValueError):
    pass


class DimensionError(FatlocusError):
    pass


class InvalidPointError(FatlocusError):
    pass


class ConfigurationError(FatlocusError):
    pass


class SchemeError(FatlocusError):
    pass


class DegenerateDirectionError(SchemeError):
    pass


class QueryError(FatlocusError):
    pass


class ParameterError(FatlocusError):
    pass


class SpaceMismatchError(FatlocusError):
    pass


class InfeasibleError(FatlocusError):
    """A generator cannot produce the requested configuration."""


class PreconditionError(FatlocusError):
    pass


class NotInBaseLocusError(PreconditionError):
    pass


class ConsistencyError(RuntimeError):
    """An invariant guaranteed by the theory was violated."""
