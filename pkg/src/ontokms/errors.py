"""Domain error hierarchy shared by every layer.

Each error carries a stable ``code`` used by the HTTP service to pick a
status and by the CLI to decide the exit code. ``detail`` is an optional
JSON-serializable payload (parse positions, conflicting ids, ...).
"""

from __future__ import annotations

from typing import Any


class KmsError(Exception):
    """Base class for all domain errors."""

    code = "Validation"

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


class NotFoundError(KmsError):
    code = "NotFound"


class ConflictError(KmsError):
    code = "Conflict"


class CycleError(KmsError):
    code = "Cycle"


class ParseError(KmsError):
    """Syntax error in RDF or query text; carries a 1-based position."""

    code = "Parse"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(message, detail={"line": line, "column": column})
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"{self.message} (line {self.line}, column {self.column})"


class ValidationError(KmsError):
    code = "Validation"


class StorageError(KmsError):
    """I/O failure while reading or writing persistent state."""

    code = "Io"
