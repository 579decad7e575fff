"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class CubeIsoError(Exception):
    """Base class for all package errors."""


class ArgumentError(CubeIsoError, ValueError):
    """Bad argument: out-of-range coordinate, malformed spec, duplicate key."""


class ConstructionError(ArgumentError):
    """Truth table could not be built from the supplied data."""


class CapacityError(CubeIsoError):
    """A size guard was exceeded (arity cap, network guard, brute-force limit)."""

    def __init__(self, message, guard=None, limit=None, value=None):
        super().__init__(message)
        self.guard = guard
        self.limit = limit
        self.value = value


class StructureError(CubeIsoError):
    """Input lacks the structure an operation requires."""


class UndefinedRatioError(CubeIsoError, ArithmeticError):
    """A ratio has a zero (or otherwise meaningless) denominator."""
