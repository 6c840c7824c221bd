"""Exception hierarchy shared by the loaders and the simulation."""


class PvBattError(Exception):
    pass


class ValidationError(PvBattError, ValueError):
    """An input file or document violates its schema or a domain invariant."""

    def __init__(self, message, *, field=None, location=None):
        self.field = field
        self.location = location
        parts = [message]
        if field is not None:
            parts.append(f"field={field}")
        if location is not None:
            parts.append(f"at {location}")
        super().__init__("; ".join(parts))


class SchemaError(ValidationError):
    pass


class InvariantError(ValidationError):
    pass


class PartitionError(ValidationError):
    """Tariff schedule does not cover every hour of a day exactly once."""


class MissingSlotError(ValidationError):
    pass


class NegativeValueError(ValidationError):
    pass


class MalformedTimestampError(ValidationError):
    pass


class UndefinedMetricError(PvBattError, ValueError):
    """A financial metric has no value for the given cash-flow stream."""


class OptimizationError(PvBattError, RuntimeError):
    pass
