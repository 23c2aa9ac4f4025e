"""Exception hierarchy shared by all modules."""


class ExtremisError(Exception):
    """Base class for errors raised by extremis."""


class InvalidInputError(ExtremisError, ValueError):
    """Malformed data: empty matrices, non-finite entries, shape mismatches."""


class ParameterError(ExtremisError, ValueError):
    """Parameters outside their admissible range (k, epsilon, p, ...)."""


class UndefinedMetricError(ExtremisError, ValueError):
    """A metric is undefined for the given labels (e.g. a single class)."""


class ModelFormatError(ExtremisError, ValueError):
    """A persisted model document could not be parsed."""


class ModelVersionError(ModelFormatError):
    """A persisted model carries a version tag this release cannot read."""
