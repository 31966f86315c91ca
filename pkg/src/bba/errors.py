"""Exception hierarchy shared by all modules."""


class BBAError(Exception):
    """Base class for every error raised by the package."""


class InputError(BBAError):
    """Malformed user input (files, class expressions, flags)."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)


class DimensionError(BBAError, ValueError):
    """Ambient or shape mismatch."""


class ContainmentError(BBAError, ValueError):
    """A subspace or vector is not where it is required to be."""


class StructureError(BBAError):
    """An algebraic identity (d^2 = 0, Leibniz, commutation) fails."""

    def __init__(self, message: str, where=None):
        self.where = where
        super().__init__(message)


class TruncationRequired(StructureError):
    """An infinite-dimensional algebra was realized without a degree bound."""


class AugmentationError(StructureError):
    pass


class UndefinedProduct(BBAError):
    """Preconditions of a Massey-type product fail."""


class NotDefinedOnPage(BBAError):
    def __init__(self, message: str, page: int):
        self.page = page
        super().__init__(message)


class NeedsCertificate(BBAError):
    pass


class MetricError(BBAError):
    pass


class CodimensionError(BBAError, ValueError):
    pass


class ResourceGuard(BBAError):
    """Refusal to build an object larger than the configured bound."""
