"""Exception types shared across the toolkit.

Everything raised on bad user input derives from ``TutorEvalError`` so the
CLI can map domain failures to exit code 1 in one place.
"""


class TutorEvalError(Exception):
    """Base class for all toolkit errors."""


class ParseError(TutorEvalError):
    """A document could not be parsed; the message carries position context."""


class LabelParseError(ParseError):
    """A string is not one of the canonical label spellings."""


class SchemaError(TutorEvalError):
    """A record is missing a required field or a field has the wrong form."""


class DuplicateIdError(TutorEvalError):
    """An identifier that must be unique appeared more than once."""


class JoinError(TutorEvalError):
    """Two record sets that must share an id set do not."""


class EmptyInputError(TutorEvalError):
    """An operation that needs at least one element received none."""


class ShapeError(TutorEvalError):
    """Matrix or vote-list dimensions are inconsistent."""


class ValidationError(TutorEvalError):
    """A value violates a documented invariant (range, distribution, config)."""
