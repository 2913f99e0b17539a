"""Exception hierarchy.

Every error carries a short machine-readable ``code``; the CLI prints it
ahead of the human message.
"""

from __future__ import annotations


class TaxcastError(Exception):
    code = "error"


class InsufficientDataError(TaxcastError, ValueError):
    code = "insufficient-data"


class InsufficientContextError(InsufficientDataError):
    code = "insufficient-context"


class ArityError(TaxcastError, ValueError):
    code = "arity"


class AlignmentError(TaxcastError, ValueError):
    code = "alignment"


class DivisionByZeroError(TaxcastError, ZeroDivisionError):
    code = "division-by-zero"

    def __init__(self, message: str, year: int | None = None):
        super().__init__(message)
        self.year = year


class DegenerateSeriesError(TaxcastError, ValueError):
    code = "degenerate-series"


class SingularDesignError(TaxcastError, ValueError):
    code = "singular-design"

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


class InvalidNestingError(TaxcastError, ValueError):
    code = "invalid-nesting"


class NonConvergenceError(TaxcastError, RuntimeError):
    code = "non-convergence"

    def __init__(self, message: str, best_point=None, best_value: float | None = None):
        super().__init__(message)
        self.best_point = best_point
        self.best_value = best_value


class SelectionFailureError(TaxcastError, RuntimeError):
    code = "selection-failure"


class ConfigurationError(TaxcastError, ValueError):
    code = "configuration"


class CsvError(TaxcastError, ValueError):
    code = "csv"

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingFileError(CsvError, FileNotFoundError):
    code = "missing-file"


class MalformedHeaderError(CsvError):
    code = "malformed-header"


class YearGapError(CsvError):
    code = "year-gap"

    def __init__(self, message: str, year: int, row=None, column=None):
        super().__init__(message, row=row, column=column)
        self.year = year


class DuplicateEntryError(CsvError):
    code = "duplicate-entry"


class NonNumericCellError(CsvError):
    code = "non-numeric"


class NonRejectionWarning(UserWarning):
    """Raised via ``warnings.warn`` when no tried differencing order looks stationary."""
