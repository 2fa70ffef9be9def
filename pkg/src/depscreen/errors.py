"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 1 (usage),
DataError -> 2 (bad input data or artifacts), NumericError -> 3
(training divergence or a failed gradient check).
"""


class DepscreenError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(DepscreenError):
    """Invalid configuration: unknown keys, out-of-range values, bad flags."""


class DataError(DepscreenError):
    """Invalid input data: malformed CSV, bad labels, broken artifacts."""


class NumericError(DepscreenError):
    """Numeric failure: non-finite loss/parameters or a failed gradient check."""
