"""Error types shared across the package.

Data errors cover malformed or inconsistent inputs (bad files, out-of-range
queries, degenerate sessions). Numeric errors cover failures of the numeric
machinery itself (diverging optimizer, non-finite loss). The CLI maps them to
exit codes 2 and 3 respectively; the service maps them to 400 and 500.
"""


class DsigError(Exception):
    """Base class for all package errors."""


class DataError(DsigError):
    """Invalid, malformed or inconsistent input data."""


class WordFormatError(DataError):
    """A word text could not be parsed against the alphabet."""


class DegenerateSessionError(DataError):
    """A session cannot be normalized (zero variance, zero final volume)."""

    def __init__(self, component: str, message: str):
        super().__init__(message)
        self.component = component


class NumericError(DsigError):
    """Numeric failure (non-finite loss, divergent optimizer)."""
