"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: usage problems exit 1, data/IO
problems exit 2, numeric failures exit 3.
"""


class PlsakitError(Exception):
    """Base class for all toolkit errors."""


class DataError(PlsakitError):
    """Missing, unreadable, or malformed input data."""


class NumericError(PlsakitError):
    """Non-finite values or other numeric breakdown detected."""
