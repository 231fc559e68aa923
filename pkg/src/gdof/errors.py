"""Exception types shared across the package."""


class GdofError(Exception):
    """Base class for all errors raised by gdof."""


class NetworkFormatError(GdofError, ValueError):
    """A network file could not be parsed.

    ``row`` and ``col`` are 1-based positions when the problem is tied to a
    single matrix entry, otherwise ``None``.
    """

    def __init__(self, message, row=None, col=None):
        if row is not None and col is not None:
            message = f"row {row}, col {col}: {message}"
        elif row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
        self.col = col


class IndexRangeError(GdofError, IndexError):
    """A user index fell outside ``1..K``."""


class CycleError(GdofError, ValueError):
    """Malformed cycle, overlapping cycles or an invalid partition."""


class CapExceeded(GdofError, ValueError):
    """An exhaustive enumeration was requested beyond its size cap."""


class RegimeError(GdofError):
    """The operation requires a regime the matrix is not in.

    ``report`` holds the RegimeReport whose violations explain the refusal.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InfeasibleError(GdofError):
    """A linear program has no feasible point."""


class SchemeError(GdofError, ValueError):
    """A layered scheme is structurally invalid for the given network."""
