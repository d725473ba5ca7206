"""Exception hierarchy shared by every layer; each class maps to a CLI exit code."""


class MotStemError(Exception):
    exit_code = 1


class ParseError(MotStemError, ValueError):
    """Malformed field string, word, or range; ``position`` is a 0-based column."""

    exit_code = 2

    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if text is not None and position is not None:
            message = f"{message} at column {position}: {text!r}"
        super().__init__(message)


class UnsupportedError(MotStemError):
    exit_code = 3


class CharacteristicError(UnsupportedError):
    """The prime equals the characteristic of the base field."""


class UnknownCohomologyError(MotStemError):
    exit_code = 4


class InconsistencyError(MotStemError):
    """An order-bookkeeping identity failed; this is a bug, never user error."""

    exit_code = 5


class RingMismatchError(MotStemError, ValueError):
    exit_code = 1
