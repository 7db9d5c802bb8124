"""Exception hierarchy shared by all crashlens modules.

UsageError maps to CLI exit code 2, DataError to 3; anything else that
escapes is an internal error (exit code 4).
"""


class CrashlensError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(CrashlensError):
    """Bad request: unknown selector, format, or invalid configuration."""


class DataError(CrashlensError):
    """Input data violates a precondition (malformed, degenerate, out of domain)."""
