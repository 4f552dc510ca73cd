"""Exceptions raised by CPROJ

All of them derive from :class:`ValueError` so that invalid input can be handled
uniformly by callers.
"""


class ScalarError(ValueError):
    """Malformed rational function, bad derivation index or unparsable literal"""


class NonContactFormError(ValueError):
    """Degenerate one-form, inadmissible rescaling or non-invertible frame"""


class RepresentativeError(ValueError):
    """Connection that does not admit contact geodesics"""


class PreconditionError(ValueError):
    """An operation was called outside of its domain of validity"""


class ManifestError(ValueError):
    """Syntax or semantic error in a manifest file"""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column
