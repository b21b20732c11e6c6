"""Exceptions raised by hy_leadlag."""
from __future__ import annotations

import typing as t


class LeadLagError(Exception):
    """Base class for all domain errors; `code` is machine readable."""

    code: str = "error"

    def __init__(self, message: str, *, code: t.Optional[str] = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class InvalidInputError(LeadLagError, ValueError):
    """Input violates the documented preconditions of an operation."""

    code = "invalid-input"


class IngestError(InvalidInputError):
    """A tick file could not be turned into a TickSeries."""

    code = "parse-error"

    def __init__(
        self,
        message: str,
        *,
        path: t.Optional[str] = None,
        row: t.Optional[int] = None,
        code: t.Optional[str] = None,
    ) -> None:
        self.path = path
        self.row = row
        where = ""
        if path is not None:
            where = f"{path}: "
        if row is not None:
            where += f"row {row}: "
        super().__init__(where + message, code=code)
