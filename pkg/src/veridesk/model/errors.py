"""Validation error vocabulary for untrusted artifact documents.

Validators never stop at the first problem: they collect every violation
they can see and raise a single ValidationError carrying the full list, so
a repair loop (or an instructor) gets the whole picture at once.

Each violation is a small frozen dataclass with a stable ``code`` and a
human-readable ``message``; ``to_dict()`` feeds error envelopes and repair
prompts.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import ClassVar, Iterable, Type, TypeVar

from ..errors import VerideskError

V = TypeVar("V", bound="Violation")


@dataclass(frozen=True)
class Violation:
    code: ClassVar[str] = "violation"

    @property
    def message(self) -> str:  # pragma: no cover - overridden everywhere
        return self.code

    def to_dict(self) -> dict:
        data = {"code": self.code, "message": self.message}
        data.update(asdict(self))
        return data

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class WeightSumError(Violation):
    code: ClassVar[str] = "weight_sum"
    actual_sum: int

    @property
    def message(self) -> str:
        return f"criterion weights must sum to 100, got {self.actual_sum}"


@dataclass(frozen=True)
class MissingLevelError(Violation):
    code: ClassVar[str] = "missing_levels"
    criterion: str
    missing_ordinals: tuple[int, ...]

    @property
    def message(self) -> str:
        ordinals = ", ".join(str(o) for o in self.missing_ordinals)
        return f"criterion {self.criterion!r} is missing performance levels {ordinals}"


@dataclass(frozen=True)
class UnexpectedLevelError(Violation):
    code: ClassVar[str] = "unexpected_levels"
    criterion: str
    ordinals: tuple[int, ...]

    @property
    def message(self) -> str:
        ordinals = ", ".join(str(o) for o in self.ordinals)
        return (
            f"criterion {self.criterion!r} has duplicate or out-of-range "
            f"level ordinals: {ordinals} (exactly one each of 1-5 required)"
        )


@dataclass(frozen=True)
class DuplicateCriterionError(Violation):
    code: ClassVar[str] = "duplicate_criterion"
    name: str

    @property
    def message(self) -> str:
        return f"criterion name {self.name!r} appears more than once"


@dataclass(frozen=True)
class EmptyRubricError(Violation):
    code: ClassVar[str] = "empty_rubric"

    @property
    def message(self) -> str:
        return "rubric must contain at least one criterion"


@dataclass(frozen=True)
class EmptyDescriptorError(Violation):
    code: ClassVar[str] = "empty_descriptor"
    path: str

    @property
    def message(self) -> str:
        return f"descriptor text at {self.path} must be nonempty"


@dataclass(frozen=True)
class EmptyTextError(Violation):
    code: ClassVar[str] = "empty_text"
    path: str

    @property
    def message(self) -> str:
        return f"text at {self.path} must be nonempty"


@dataclass(frozen=True)
class InvalidWeightError(Violation):
    code: ClassVar[str] = "invalid_weight"
    criterion: str
    weight: int

    @property
    def message(self) -> str:
        return f"criterion {self.criterion!r} has weight {self.weight}; weights are integers >= 1"


@dataclass(frozen=True)
class MalformedFieldError(Violation):
    code: ClassVar[str] = "malformed_field"
    path: str
    expected: str

    @property
    def message(self) -> str:
        return f"field at {self.path} is missing or not {self.expected}"


@dataclass(frozen=True)
class SchemaVersionError(Violation):
    code: ClassVar[str] = "schema_version"
    found: str

    @property
    def message(self) -> str:
        return f"unsupported schema_version {self.found!r} (expected '1')"


@dataclass(frozen=True)
class TooManyQuestionsError(Violation):
    code: ClassVar[str] = "too_many_questions"
    count: int

    @property
    def message(self) -> str:
        return f"a question set holds at most 3 questions, got {self.count}"


@dataclass(frozen=True)
class EmptyQuestionSetError(Violation):
    code: ClassVar[str] = "empty_question_set"

    @property
    def message(self) -> str:
        return "a question set must contain at least one question"


@dataclass(frozen=True)
class MissingTargetCriterionError(Violation):
    code: ClassVar[str] = "missing_target_criterion"
    question_id: str

    @property
    def message(self) -> str:
        return f"evaluative question {self.question_id!r} must name a target criterion"


@dataclass(frozen=True)
class UnknownCriterionError(Violation):
    code: ClassVar[str] = "unknown_criterion"
    question_id: str
    name: str

    @property
    def message(self) -> str:
        return f"question {self.question_id!r} targets unknown criterion {self.name!r}"


@dataclass(frozen=True)
class DuplicateQuestionIdError(Violation):
    code: ClassVar[str] = "duplicate_question_id"
    question_id: str

    @property
    def message(self) -> str:
        return f"question id {self.question_id!r} appears more than once"


@dataclass(frozen=True)
class ScoreRangeError(Violation):
    code: ClassVar[str] = "score_range"
    path: str
    score: int

    @property
    def message(self) -> str:
        return f"score at {self.path} is {self.score}; scores are integers 1-5"


@dataclass(frozen=True)
class AlignmentError(Violation):
    code: ClassVar[str] = "alignment"
    missing: tuple[str, ...]
    extra: tuple[str, ...]

    @property
    def message(self) -> str:
        parts = []
        if self.missing:
            parts.append("missing criteria: " + ", ".join(repr(n) for n in self.missing))
        if self.extra:
            parts.append("unknown criteria: " + ", ".join(repr(n) for n in self.extra))
        return "; ".join(parts) or "misaligned criterion names"


@dataclass(frozen=True)
class InitialScoreMismatchError(Violation):
    code: ClassVar[str] = "initial_score_mismatch"
    criterion: str

    @property
    def message(self) -> str:
        return (
            f"entry for {self.criterion!r} does not echo the approved initial score"
        )


@dataclass(frozen=True)
class DeltaArithmeticError(Violation):
    code: ClassVar[str] = "delta_arithmetic"
    criterion: str

    @property
    def message(self) -> str:
        return f"entry for {self.criterion!r} claims a delta that is not final minus initial"


@dataclass(frozen=True)
class EditPathError(Violation):
    code: ClassVar[str] = "edit_path"
    path: str

    @property
    def message(self) -> str:
        return f"edit path {self.path!r} does not resolve in the target document"


@dataclass(frozen=True)
class StaleEditError(Violation):
    code: ClassVar[str] = "stale_edit"
    path: str

    @property
    def message(self) -> str:
        return f"edit at {self.path!r} was computed against a different value than the current one"


@dataclass(frozen=True)
class ProtectedFieldError(Violation):
    code: ClassVar[str] = "protected_field"
    path: str

    @property
    def message(self) -> str:
        return f"field at {self.path!r} is system-managed and cannot be edited"


class ValidationError(VerideskError):
    """Raised with the complete list of violations found in a candidate."""

    code = "validation_failed"

    def __init__(self, violations: Iterable[Violation]):
        self.violations: tuple[Violation, ...] = tuple(violations)
        if not self.violations:
            raise ValueError("ValidationError requires at least one violation")
        summary = "; ".join(v.message for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {summary}")

    def has(self, kind: Type[Violation]) -> bool:
        return any(isinstance(v, kind) for v in self.violations)

    def first(self, kind: Type[V]) -> V:
        for v in self.violations:
            if isinstance(v, kind):
                return v
        raise KeyError(kind.__name__)

    def details(self) -> dict:
        return {"violations": [v.to_dict() for v in self.violations]}


class KindMismatchError(VerideskError):
    """Two artifacts of different kinds were handed to a same-kind operation."""

    code = "kind_mismatch"

    def __init__(self, left: str, right: str):
        super().__init__(f"cannot operate across artifact kinds: {left} vs {right}")
        self.left = left
        self.right = right

    def details(self) -> dict:
        return {"left": self.left, "right": self.right}


def single(violation: Violation) -> ValidationError:
    """Convenience for raising one violation."""
    return ValidationError([violation])
