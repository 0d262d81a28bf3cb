"""Exception hierarchy shared by all pipeline stages."""

from __future__ import annotations


class SonificationError(Exception):
    """Base class for every error raised by sonimetrics."""


class ParseError(SonificationError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(SonificationError, ValueError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message)


class RangeError(SonificationError, ValueError):
    pass


class DomainError(SonificationError, ValueError):
    pass


class MissingBaselineError(SonificationError, LookupError):
    pass


class ConfigError(SonificationError, ValueError):
    pass


class InsertIOError(SonificationError, OSError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")
