"""Exception taxonomy shared across the package."""


class BimonoError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(BimonoError, ValueError):
    """Malformed or inconsistent arguments (length mismatch, bad labels, ...)."""


class ResourceLimitError(BimonoError):
    """A configured bound (enumeration size, word length, truncation) would be exceeded."""


class IncompleteTableError(BimonoError, LookupError):
    """A cumulant table lacks an entry the computation needs."""


class SingularSeriesError(BimonoError, ArithmeticError):
    """A series operation requires an invertible leading coefficient."""


class UnsupportedParametersError(BimonoError):
    """Parameters fall outside the exactly-representable regime."""
