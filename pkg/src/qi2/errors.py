"""Exception hierarchy shared across the package.

ConfigError maps to CLI exit code 1, DataError to 2; anything else is an
internal error (exit 3).
"""


class Qi2Error(Exception):
    """Base class for all qi2 errors."""


class ConfigError(Qi2Error):
    """Invalid parameters, column declarations, ranges, or metric choices."""


class DataError(Qi2Error):
    """Malformed, inconsistent, or truncated input data and result files."""
