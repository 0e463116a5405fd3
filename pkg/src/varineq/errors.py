"""Exception hierarchy shared by every module."""


class VarineqError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(VarineqError, ValueError):
    """An argument is outside the operation's domain (q < 1, empty family, ...)."""


class SizeError(VarineqError, ValueError):
    """An input is too large for the requested exact computation."""


class KernelError(VarineqError, ValueError):
    """A kernel could not be evaluated or integrated."""


class DecompositionError(VarineqError):
    """The Calderon-Zygmund construction could not satisfy its postconditions."""

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class ReportParseError(VarineqError, ValueError):
    """A report or config file does not match the expected schema."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
