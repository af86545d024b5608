"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class EpfregError(Exception):
    """Base class for all package errors."""


class ConfigError(EpfregError):
    """Invalid configuration: bad flag combination, cap violation, etc."""


class DataError(EpfregError):
    """Input data cannot be loaded or repaired."""


class ParseError(DataError):
    """Malformed CSV row; carries the 1-based line number."""

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class SchemaError(DataError):
    """Header does not match the market's variable set."""


class NumericError(EpfregError):
    """Numerical failure during fitting or transformation."""


class DegenerateSampleError(NumericError):
    """Sample is empty, constant, or otherwise unusable for an ECDF."""


class DegenerateFitError(NumericError):
    """A fit has exactly zero residual sum of squares (BIC undefined)."""


class CoverageError(EpfregError):
    """Forecast records do not cover complete 24-hour days."""


class FoldError(EpfregError):
    """Cross-validation folds cannot be constructed from the data."""
