"""Shared exception types."""


class TreebandError(Exception):
    """Base class for all library errors."""


class FormatError(TreebandError):
    """Malformed input text; carries the offending line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class ParameterError(TreebandError):
    """Family/operation parameter out of its documented range."""


class StructureError(TreebandError):
    """Input object violates a structural precondition (not spanning, not a tree, ...)."""


class InvalidLayoutError(TreebandError):
    """A tree-layout failed validation where a valid one was required."""


class PreconditionError(TreebandError):
    """A checked precondition (fan/dipole conditions, 2-connectivity, ...) does not hold."""


class SizeLimitError(TreebandError):
    """Instance exceeds the configured size limit of an exact routine."""


class BudgetExceededError(TreebandError):
    """Search budget exhausted before an answer was determined (explicitly not a wrong answer)."""
