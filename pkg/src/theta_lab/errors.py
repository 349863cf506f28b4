"""Exception hierarchy shared by every module.

CLI exit codes map onto these: precondition -> 2, parse -> 3, resource -> 4.
"""


class ThetaLabError(Exception):
    """Base class for library errors."""


class InputError(ThetaLabError, ValueError):
    """Malformed arguments: out-of-range vertices, wrong arity, bad parameters."""


class ParseError(InputError):
    """A text file does not follow the instance/certificate grammar."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PreconditionError(ThetaLabError, ValueError):
    """An algorithm was called on an instance outside its contract."""

    def __init__(self, message: str, violation=None):
        super().__init__(message)
        self.violation = violation


class ResourceError(ThetaLabError, RuntimeError):
    """An exact solver refused an instance beyond its limits."""

    def __init__(self, message: str, limit: str | None = None):
        super().__init__(message)
        self.limit = limit


class GenerationError(ThetaLabError, RuntimeError):
    """A generator could not realise the requested parameters."""
