"""Exceptions raised by doekit."""

__all__ = [
    "CapacityError",
    "DoekitError",
    "EstimationError",
    "ParseError",
    "ValidationError",
]


class DoekitError(Exception):
    """Base class of doekit errors."""


class ValidationError(DoekitError, ValueError):
    """Invalid factor, design, model or argument."""


class CapacityError(ValidationError):
    """A design size guard was exceeded."""


class EstimationError(DoekitError, ArithmeticError):
    """An effect cannot be estimated from the available runs."""


class ParseError(ValidationError):
    """Malformed CSV or JSON content."""

    def __init__(self, message, path=None, row=None, column=None):
        self.path = path
        self.row = row
        self.column = column

        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
