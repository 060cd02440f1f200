"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Requested register size is outside the supported range."""


class DegenerateWindowError(ValueError):
    """A signal window collapses to the zero vector and cannot be encoded."""


class ParseError(ValueError):
    """CSV input could not be parsed; carries a 1-based row/column location."""

    def __init__(self, message, row=None, column=None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.row = row
        self.column = column
