"""Exception hierarchy shared by every maxharm module."""


class MaxHarmError(Exception):
    """Base class for all library errors."""


class ParameterError(MaxHarmError, ValueError):
    """An argument lies outside the admissible range of an operation."""


class DomainError(MaxHarmError, ValueError):
    """A stencil or ball does not fit inside the domain, or the topology is wrong."""


class FieldFormatError(MaxHarmError, ValueError):
    """A field file is malformed."""


class PreconditionError(MaxHarmError, ValueError):
    """The input violates a hypothesis of the inequality being tested."""


class ConfigError(MaxHarmError, ValueError):
    """An experiment or verification config is invalid."""


class ConvergenceError(MaxHarmError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance.

    The partial solve report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
