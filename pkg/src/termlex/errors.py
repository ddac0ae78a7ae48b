"""Exception types shared across the toolkit."""


class TermlexError(Exception):
    """Base class for user-facing errors (bad input, bad configuration)."""


class InputFormatError(TermlexError):
    """A data file violates its expected format.

    Carries the offending path and, when known, the 1-based line number.
    """

    def __init__(self, message: str, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class DegenerateMarginalsError(TermlexError):
    """Fleiss kappa is undefined: all rating mass sits in one category
    while subjects still disagree (expected agreement equals 1)."""
