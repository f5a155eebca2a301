# errors.py
"""
Exception hierarchy for sharelogic.

Every error raised on purpose derives from ShareLogicError. The category base
classes carry the process exit code the command line reports for them.
"""


class ShareLogicError(Exception):
    """Base class for all errors raised by sharelogic."""
    exit_code = 1


class InputError(ShareLogicError):
    """Malformed input text or document."""
    exit_code = 2


class ParseError(InputError):
    """A formula string does not match the grammar."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 expected: list[str] | None = None):
        self.line = line
        self.column = column
        self.expected = sorted(expected or [])
        where = f" at line {line}, column {column}" if line is not None else ""
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message}{where}{hint}")


class SchemaError(InputError):
    """A JSON document does not match its schema."""


class SemanticError(ShareLogicError):
    """Well-formed input that refers to things that do not exist or do not fit."""
    exit_code = 3


class UnknownAgent(SemanticError):
    pass


class EmptyGroup(SemanticError):
    pass


class UnknownEventModel(SemanticError):
    pass


class UnknownEvent(SemanticError):
    pass


class UnknownState(SemanticError):
    pass


class UnknownGroup(SemanticError):
    pass


class PartitionError(SemanticError):
    """A relation listing is not a partition of its carrier."""


class EventModelError(SemanticError):
    """An event model violates the reading invariants."""


class UniverseMismatch(SemanticError):
    pass


class DynamicOperatorOnPseudoModel(SemanticError):
    pass


class UnsupportedFragment(ShareLogicError):
    """The formula lies outside the fragment an operation handles."""
    exit_code = 4


class EventOperatorPresent(UnsupportedFragment):
    pass


class ResourceLimitExceeded(ShareLogicError):
    exit_code = 5


class ReductionError(ShareLogicError):
    """The rewriting step bound was exceeded."""


class WitnessVerificationFailed(ShareLogicError):
    """A constructed satisfiability witness failed re-verification."""
