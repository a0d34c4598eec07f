"""Errors raised while generating artifacts through a provider."""

from __future__ import annotations

from typing import Sequence

from ..errors import VerideskError
from ..model.errors import Violation


class GenerationError(VerideskError):
    code = "generation_error"


class MissingContextError(GenerationError):
    code = "missing_context"

    def __init__(self, task: str, missing: Sequence[str]):
        self.task = task
        self.missing = tuple(missing)
        fields = ", ".join(self.missing)
        super().__init__(f"task {task} requires context fields: {fields}")

    def details(self) -> dict:
        return {"task": self.task, "missing": list(self.missing)}


class ProviderError(GenerationError):
    """Transport or upstream failure talking to the model provider."""

    code = "provider_error"


class ProviderTimeoutError(ProviderError):
    code = "provider_timeout"


class SchemaFailureExhaustedError(GenerationError):
    """Every attempt produced output the validator rejected."""

    code = "generation_exhausted"

    def __init__(
        self,
        attempts: int,
        last_errors: Sequence[Violation],
        transcripts: Sequence = (),
    ):
        self.attempts = attempts
        self.last_errors = tuple(last_errors)
        self.transcripts = tuple(transcripts)
        summary = "; ".join(v.message for v in self.last_errors) or "unparseable output"
        super().__init__(
            f"no schema-valid output after {attempts} attempt(s); last errors: {summary}"
        )

    def details(self) -> dict:
        return {
            "attempts": self.attempts,
            "last_errors": [v.to_dict() for v in self.last_errors],
        }
