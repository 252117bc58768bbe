"""Exception types raised by epimc."""


class EpimcError(Exception):
    """Base class for all package errors."""


class TieError(EpimcError, ValueError):
    """Two event paths jump at exactly the same time."""


class FeasibilityError(EpimcError, ValueError):
    """A compartment count goes negative somewhere on [0, T]."""


class InversionError(EpimcError, ValueError):
    """A birth path jumps at a time where its intensity is zero."""


class ParseError(EpimcError, ValueError):
    """Malformed input file or configuration."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
