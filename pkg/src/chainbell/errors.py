"""Exception hierarchy shared across the package."""


class ChainBellError(Exception):
    pass


class ParameterError(ChainBellError, ValueError):
    """An argument is malformed (wrong type, parity, or outside its domain)."""


class RangeError(ChainBellError, ValueError):
    """Arguments are well formed but outside the region where a result exists."""


class ResourceError(ChainBellError):
    """The requested problem is too large to enumerate."""


class SolverError(ChainBellError):
    """The LP solver failed to converge or lost numerical feasibility."""


class ModelValidationError(ChainBellError, ValueError):
    """A serialized model does not satisfy the schema or normalization."""
