"""Structured generation with a bounded repair loop.

The only success path runs the matching document validator, so an invalid
artifact cannot leave this module. Failed attempts re-prompt with the full
validator error list and the offending output appended, up to
``max_attempts`` total provider calls. Every call, failed or not, becomes
an audit transcript.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..model import validators
from ..model.errors import MalformedFieldError, ValidationError, Violation
from ..model.types import InitialAssessment, Provenance, Reassessment, Rubric
from .context import ContextBundle, Task
from .errors import SchemaFailureExhaustedError
from .prompts import TEMPLATE_VERSION, render_prompt, repair_prompt
from .providers import Provider

DEFAULT_PARAMS: Mapping[str, Any] = {"temperature": 0.0, "top_p": 1.0}

_JSON_OBJECT = re.compile(r"\{.*\}", re.DOTALL)


@dataclass(frozen=True)
class GatewayConfig:
    max_attempts: int = 3
    concurrency: int = 4
    params: Mapping[str, Any] = field(default_factory=lambda: dict(DEFAULT_PARAMS))
    template_version: str = TEMPLATE_VERSION

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        if self.concurrency < 1:
            raise ValueError("concurrency must be at least 1")


@dataclass(frozen=True)
class AttemptTranscript:
    """One provider call: what was asked, what came back, what was wrong.

    Carries no timestamp on purpose: transcripts feed audit bundles, which
    must be byte-identical across equivalent runs.
    """

    attempt: int
    prompt: str
    response: str
    errors: tuple[dict, ...]
    provider: str
    model: str
    template_version: str
    params: Mapping[str, Any]

    def to_dict(self) -> dict:
        return {
            "attempt": self.attempt,
            "prompt": self.prompt,
            "response": self.response,
            "errors": list(self.errors),
            "provider": self.provider,
            "model": self.model,
            "template_version": self.template_version,
            "params": dict(self.params),
        }


@dataclass(frozen=True)
class GenerationOutcome:
    artifact: Any
    attempts_used: int
    transcripts: tuple[AttemptTranscript, ...]


def extract_json(raw: str) -> Any:
    """Parse the reply as JSON, tolerating prose around one JSON object."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        pass
    match = _JSON_OBJECT.search(raw)
    if match:
        try:
            return json.loads(match.group(0))
        except json.JSONDecodeError:
            pass
    raise ValidationError(
        [MalformedFieldError(path=".", expected="a single JSON object")]
    )


class Gateway:
    """Runs generation tasks against one provider under one config."""

    def __init__(self, provider: Provider, config: GatewayConfig | None = None):
        self.provider = provider
        self.config = config or GatewayConfig()
        self._slots = threading.BoundedSemaphore(self.config.concurrency)

    def generate(
        self,
        task: Task,
        context: ContextBundle,
        *,
        rubric_id: str | None = None,
        assignment_id: str = "",
        rubric_version: int = 1,
    ) -> GenerationOutcome:
        """Generate and validate one artifact, repairing up to the bound.

        Raises SchemaFailureExhaustedError when every attempt fails
        validation; provider transport errors propagate as ProviderError.
        """
        base_prompt = render_prompt(task, context, self.config.template_version)
        prompt = base_prompt
        transcripts: list[AttemptTranscript] = []
        last_errors: tuple[Violation, ...] = ()

        for attempt in range(1, self.config.max_attempts + 1):
            with self._slots:
                raw = self.provider.complete(prompt, self.config.params)
            try:
                document = extract_json(raw)
                artifact = self._validate(
                    task,
                    document,
                    context,
                    rubric_id=rubric_id,
                    assignment_id=assignment_id,
                    rubric_version=rubric_version,
                )
            except ValidationError as exc:
                last_errors = exc.violations
                error_dicts = tuple(v.to_dict() for v in exc.violations)
                transcripts.append(self._transcript(attempt, prompt, raw, error_dicts))
                prompt = repair_prompt(base_prompt, list(error_dicts), raw)
                continue
            transcripts.append(self._transcript(attempt, prompt, raw, ()))
            return GenerationOutcome(
                artifact=artifact, attempts_used=attempt, transcripts=tuple(transcripts)
            )

        raise SchemaFailureExhaustedError(
            attempts=self.config.max_attempts,
            last_errors=last_errors,
            transcripts=tuple(transcripts),
        )

    def _transcript(
        self, attempt: int, prompt: str, response: str, errors: tuple[dict, ...]
    ) -> AttemptTranscript:
        return AttemptTranscript(
            attempt=attempt,
            prompt=prompt,
            response=response,
            errors=errors,
            provider=self.provider.name,
            model=self.provider.model,
            template_version=self.config.template_version,
            params=dict(self.config.params),
        )

    def _validate(
        self,
        task: Task,
        document: Any,
        context: ContextBundle,
        *,
        rubric_id: str | None,
        assignment_id: str,
        rubric_version: int,
    ):
        if task is Task.RUBRIC_GENERATION:
            return validators.validate_rubric(
                document,
                rubric_id=rubric_id,
                assignment_id=assignment_id,
                version=rubric_version,
            )
        if task is Task.AUTO_SCORING:
            return validators.validate_initial_scores(document, context.rubric)
        if task is Task.QUESTION_DRAFTING:
            return validators.validate_question_set(document, context.rubric)
        return validators.validate_reassessment(document, context.rubric, context.initial)


def generate(
    task: Task,
    context: ContextBundle,
    provider: Provider,
    config: GatewayConfig | None = None,
    **kwargs,
) -> GenerationOutcome:
    return Gateway(provider, config).generate(task, context, **kwargs)


def reassess_guard(
    initial: InitialAssessment, candidate: Reassessment, rubric: Rubric
) -> Reassessment:
    """Re-anchor a schema-valid reassessment to the approved initial scores.

    Verifies initial-score echoes and delta arithmetic, then recomputes the
    final total, overwriting whatever the candidate claimed.
    """
    from .. import scoring

    total, _ = scoring.merge_reassessment(rubric, initial, candidate.entries)
    if total == candidate.final_weighted_total_tenths:
        return candidate
    return Reassessment(
        entries=candidate.entries,
        final_weighted_total_tenths=total,
        final_feedback=candidate.final_feedback,
        provenance=candidate.provenance,
    )
