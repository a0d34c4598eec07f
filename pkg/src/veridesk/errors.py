"""Root of the exception hierarchy.

Every error the package raises on purpose derives from VerideskError and
carries a stable machine-readable ``code`` used by the HTTP error envelope
and the CLI exit-code mapping.
"""

from __future__ import annotations


class VerideskError(Exception):
    """Base class for all domain, workflow, gateway, and storage errors."""

    code = "internal_error"

    def details(self) -> dict:
        """Structured payload for error envelopes. Subclasses override."""
        return {}


def envelope(exc: BaseException) -> dict:
    """The wire form of any error: {code, message, details}."""
    if isinstance(exc, VerideskError):
        return {"code": exc.code, "message": str(exc), "details": exc.details()}
    return {"code": "internal_error", "message": str(exc), "details": {}}


class NotFoundError(VerideskError):
    code = "not_found"

    def __init__(self, kind: str, identifier: str):
        super().__init__(f"{kind} {identifier!r} not found")
        self.kind = kind
        self.identifier = identifier

    def details(self) -> dict:
        return {"kind": self.kind, "id": self.identifier}
