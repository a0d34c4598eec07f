"""Domain value types for the assessment workflow.

Everything here is a frozen dataclass: pure values, safe to share across
threads, compared by content. Constructors enforce the local invariants of
each type (score ranges, nonempty text, weight sums); cross-artifact rules
that need a rubric or an earlier assessment in hand live in the document
validators and the workflow engine.

Serialization is symmetric: ``from_dict(x.to_dict()) == x`` for every
valid value, and the dict shape matches the documented external schemas
(schema_version "1").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping, Sequence

from .errors import (
    AlignmentError,
    DeltaArithmeticError,
    DuplicateCriterionError,
    DuplicateQuestionIdError,
    EmptyQuestionSetError,
    EmptyRubricError,
    EmptyTextError,
    InvalidWeightError,
    MalformedFieldError,
    MissingLevelError,
    MissingTargetCriterionError,
    ScoreRangeError,
    TooManyQuestionsError,
    UnexpectedLevelError,
    WeightSumError,
    single,
)

SCHEMA_VERSION = "1"

LEVEL_ORDINALS = (1, 2, 3, 4, 5)
SCORE_MIN = 1
SCORE_MAX = 5

# Weighted totals are stored as integer tenths; the 1-5 score scale maps
# onto 20.0-100.0 points.
TOTAL_TENTHS_MIN = 200
TOTAL_TENTHS_MAX = 1000


class Provenance(str, Enum):
    GENERATED = "generated"
    INSTRUCTOR_EDITED = "instructor_edited"


class QuestionKind(str, Enum):
    EVALUATIVE = "evaluative"
    AUTHENTICITY = "authenticity"


class ApprovalStage(str, Enum):
    RUBRIC = "rubric"
    INITIAL_SCORES = "initial_scores"
    QUESTIONS = "questions"
    REASSESSMENT = "reassessment"


def _require_text(value: str, path: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise single(EmptyTextError(path=path))
    return value


def _require_score(value: int, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not SCORE_MIN <= value <= SCORE_MAX:
        raise single(ScoreRangeError(path=path, score=value))
    return value


def _require_utc(value: datetime, path: str) -> datetime:
    if not isinstance(value, datetime) or value.tzinfo is None:
        raise single(EmptyTextError(path=path))  # pragma: no cover - programming error
    return value.astimezone(timezone.utc)


def _parse_ts(value: str) -> datetime:
    return datetime.fromisoformat(value)


def canon_name(name: str) -> str:
    """Criterion identity key: trimmed, case-insensitive."""
    return name.strip().lower()


@dataclass(frozen=True)
class PerformanceLevel:
    """One observable performance band on the 1-5 ordinal scale."""

    level: int
    descriptor: str

    def __post_init__(self):
        if self.level not in LEVEL_ORDINALS:
            raise single(ScoreRangeError(path="level", score=self.level))
        _require_text(self.descriptor, "descriptor")

    def to_dict(self) -> dict:
        return {"level": self.level, "desc": self.descriptor}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PerformanceLevel":
        return cls(level=data["level"], descriptor=data["desc"])


@dataclass(frozen=True)
class Criterion:
    """A weighted, named dimension of the rubric with all five levels."""

    name: str
    weight: int
    description: str
    levels: tuple[PerformanceLevel, ...]

    def __post_init__(self):
        _require_text(self.name, "criterion_name")
        if not isinstance(self.weight, int) or isinstance(self.weight, bool) or self.weight < 1:
            raise single(InvalidWeightError(criterion=self.name, weight=self.weight))
        _require_text(self.description, "description")
        ordinals = [lv.level for lv in self.levels]
        missing = tuple(o for o in LEVEL_ORDINALS if o not in ordinals)
        if missing:
            raise single(MissingLevelError(criterion=self.name, missing_ordinals=missing))
        duplicated = tuple(sorted({o for o in ordinals if ordinals.count(o) > 1}))
        if duplicated:
            raise single(UnexpectedLevelError(criterion=self.name, ordinals=duplicated))
        object.__setattr__(self, "levels", tuple(sorted(self.levels, key=lambda lv: lv.level)))

    def level(self, ordinal: int) -> PerformanceLevel:
        return self.levels[ordinal - 1]

    def to_dict(self) -> dict:
        return {
            "criterion_name": self.name,
            "weight": self.weight,
            "description": self.description,
            "levels": [lv.to_dict() for lv in self.levels],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Criterion":
        return cls(
            name=data["criterion_name"],
            weight=data["weight"],
            description=data["description"],
            levels=tuple(PerformanceLevel.from_dict(lv) for lv in data["levels"]),
        )


@dataclass(frozen=True)
class Rubric:
    """An analytic rubric: weighted criteria whose weights sum to 100."""

    rubric_id: str
    assignment_id: str
    criteria: tuple[Criterion, ...]
    provenance: Provenance = Provenance.GENERATED
    version: int = 1

    def __post_init__(self):
        if not self.criteria:
            raise single(EmptyRubricError())
        seen: set[str] = set()
        for criterion in self.criteria:
            key = canon_name(criterion.name)
            if key in seen:
                raise single(DuplicateCriterionError(name=criterion.name))
            seen.add(key)
        total = sum(c.weight for c in self.criteria)
        if total != 100:
            raise single(WeightSumError(actual_sum=total))
        if not isinstance(self.version, int) or self.version < 1:
            raise single(MalformedFieldError(path="version", expected="integer >= 1"))

    @property
    def criterion_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.criteria)

    def criterion(self, name: str) -> Criterion:
        key = name.strip()
        for c in self.criteria:
            if c.name.strip() == key:
                return c
        raise single(AlignmentError(missing=(), extra=(name,)))

    def has_criterion(self, name: str) -> bool:
        key = name.strip()
        return any(c.name.strip() == key for c in self.criteria)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "rubric_id": self.rubric_id,
            "assignment_id": self.assignment_id,
            "provenance": self.provenance.value,
            "version": self.version,
            "criteria": [c.to_dict() for c in self.criteria],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Rubric":
        return cls(
            rubric_id=data["rubric_id"],
            assignment_id=data["assignment_id"],
            provenance=Provenance(data["provenance"]),
            version=data["version"],
            criteria=tuple(Criterion.from_dict(c) for c in data["criteria"]),
        )


@dataclass(frozen=True)
class Submission:
    """A student's original response, immutable once received."""

    submission_id: str
    case_id: str
    author_ref: str
    body: str
    received_at: datetime

    def __post_init__(self):
        _require_text(self.body, "body")
        object.__setattr__(self, "received_at", _require_utc(self.received_at, "received_at"))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "submission_id": self.submission_id,
            "case_id": self.case_id,
            "author_ref": self.author_ref,
            "body": self.body,
            "received_at": self.received_at.isoformat(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Submission":
        return cls(
            submission_id=data["submission_id"],
            case_id=data["case_id"],
            author_ref=data["author_ref"],
            body=data["body"],
            received_at=_parse_ts(data["received_at"]),
        )


@dataclass(frozen=True)
class CriterionScore:
    """A 1-5 score plus justification for one rubric criterion."""

    criterion_name: str
    score: int
    justification: str

    def __post_init__(self):
        _require_text(self.criterion_name, "criterion_name")
        _require_score(self.score, f"scores[{self.criterion_name}]")
        _require_text(self.justification, "justification")

    def to_dict(self) -> dict:
        return {
            "criterion_name": self.criterion_name,
            "score": self.score,
            "justification": self.justification,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CriterionScore":
        return cls(
            criterion_name=data["criterion_name"],
            score=data["score"],
            justification=data["justification"],
        )


def _check_total_tenths(tenths: int, path: str) -> int:
    if not isinstance(tenths, int) or isinstance(tenths, bool):
        raise single(ScoreRangeError(path=path, score=tenths))
    if not TOTAL_TENTHS_MIN <= tenths <= TOTAL_TENTHS_MAX:
        raise single(ScoreRangeError(path=path, score=tenths))
    return tenths


def _check_distinct_names(names: Sequence[str]) -> None:
    seen: set[str] = set()
    for name in names:
        key = canon_name(name)
        if key in seen:
            raise single(DuplicateCriterionError(name=name))
        seen.add(key)


@dataclass(frozen=True)
class InitialAssessment:
    """Stage 1b result: one score per rubric criterion plus the cached total.

    The total is stored in integer tenths and is never authoritative: the
    workflow engine recomputes and verifies it on every application. Use
    ``build`` to construct one against a rubric.
    """

    scores: tuple[CriterionScore, ...]
    weighted_total_tenths: int
    provenance: Provenance = Provenance.GENERATED

    def __post_init__(self):
        if not self.scores:
            raise single(AlignmentError(missing=(), extra=()))
        _check_distinct_names([s.criterion_name for s in self.scores])
        _check_total_tenths(self.weighted_total_tenths, "weighted_total_tenths")

    @classmethod
    def build(
        cls,
        rubric: Rubric,
        scores: Sequence[CriterionScore],
        provenance: Provenance = Provenance.GENERATED,
    ) -> "InitialAssessment":
        """Construct with bijection against ``rubric`` enforced and the total computed."""
        from .. import scoring

        vector = {s.criterion_name: s.score for s in scores}
        tenths = scoring.weighted_total_tenths(rubric, vector)
        ordered = _order_by_rubric(rubric, scores, key=lambda s: s.criterion_name)
        return cls(scores=tuple(ordered), weighted_total_tenths=tenths, provenance=provenance)

    def score_for(self, criterion_name: str) -> CriterionScore:
        key = criterion_name.strip()
        for s in self.scores:
            if s.criterion_name.strip() == key:
                return s
        raise single(AlignmentError(missing=(criterion_name,), extra=()))

    def score_vector(self) -> dict[str, int]:
        return {s.criterion_name: s.score for s in self.scores}

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "provenance": self.provenance.value,
            "weighted_total_tenths": self.weighted_total_tenths,
            "scores": [s.to_dict() for s in self.scores],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "InitialAssessment":
        return cls(
            provenance=Provenance(data["provenance"]),
            weighted_total_tenths=data["weighted_total_tenths"],
            scores=tuple(CriterionScore.from_dict(s) for s in data["scores"]),
        )


def _order_by_rubric(rubric: Rubric, items: Sequence, key) -> list:
    by_name = {key(item).strip(): item for item in items}
    return [by_name[c.name.strip()] for c in rubric.criteria]


@dataclass(frozen=True)
class FollowUpQuestion:
    """A targeted probe sent to the student after initial scoring."""

    question_id: str
    kind: QuestionKind
    text: str
    target_criterion: str | None = None

    def __post_init__(self):
        _require_text(self.question_id, "question_id")
        _require_text(self.text, "text")
        if self.kind is QuestionKind.EVALUATIVE and not (
            self.target_criterion and self.target_criterion.strip()
        ):
            raise single(MissingTargetCriterionError(question_id=self.question_id))

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "kind": self.kind.value,
            "target_criterion": self.target_criterion,
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FollowUpQuestion":
        return cls(
            question_id=data["question_id"],
            kind=QuestionKind(data["kind"]),
            target_criterion=data.get("target_criterion"),
            text=data["text"],
        )


@dataclass(frozen=True)
class QuestionSet:
    """One to three follow-up questions with distinct ids."""

    questions: tuple[FollowUpQuestion, ...]
    provenance: Provenance = Provenance.GENERATED

    def __post_init__(self):
        if not self.questions:
            raise single(EmptyQuestionSetError())
        if len(self.questions) > 3:
            raise single(TooManyQuestionsError(count=len(self.questions)))
        seen: set[str] = set()
        for q in self.questions:
            if q.question_id in seen:
                raise single(DuplicateQuestionIdError(question_id=q.question_id))
            seen.add(q.question_id)

    @property
    def question_ids(self) -> tuple[str, ...]:
        return tuple(q.question_id for q in self.questions)

    def question(self, question_id: str) -> FollowUpQuestion:
        for q in self.questions:
            if q.question_id == question_id:
                return q
        raise KeyError(question_id)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "provenance": self.provenance.value,
            "questions": [q.to_dict() for q in self.questions],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "QuestionSet":
        return cls(
            provenance=Provenance(data["provenance"]),
            questions=tuple(FollowUpQuestion.from_dict(q) for q in data["questions"]),
        )


@dataclass(frozen=True)
class FollowUpResponse:
    """The student's answer to one approved follow-up question."""

    question_id: str
    body: str
    received_at: datetime

    def __post_init__(self):
        _require_text(self.question_id, "question_id")
        _require_text(self.body, "body")
        object.__setattr__(self, "received_at", _require_utc(self.received_at, "received_at"))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "question_id": self.question_id,
            "body": self.body,
            "received_at": self.received_at.isoformat(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FollowUpResponse":
        return cls(
            question_id=data["question_id"],
            body=data["body"],
            received_at=_parse_ts(data["received_at"]),
        )


@dataclass(frozen=True)
class ReassessedCriterion:
    """Final score for one criterion with the movement from the initial score."""

    criterion_name: str
    initial_score: int
    final_score: int
    delta: int
    rationale: str

    def __post_init__(self):
        _require_text(self.criterion_name, "criterion_name")
        _require_score(self.initial_score, f"entries[{self.criterion_name}].initial_score")
        _require_score(self.final_score, f"entries[{self.criterion_name}].final_score")
        if self.delta != self.final_score - self.initial_score:
            raise single(DeltaArithmeticError(criterion=self.criterion_name))
        _require_text(self.rationale, f"entries[{self.criterion_name}].rationale")

    def to_dict(self) -> dict:
        return {
            "criterion_name": self.criterion_name,
            "initial_score": self.initial_score,
            "final_score": self.final_score,
            "delta": self.delta,
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ReassessedCriterion":
        return cls(
            criterion_name=data["criterion_name"],
            initial_score=data["initial_score"],
            final_score=data["final_score"],
            delta=data["delta"],
            rationale=data["rationale"],
        )


@dataclass(frozen=True)
class Reassessment:
    """Stage 2b result: per-criterion final scores, total, and final feedback."""

    entries: tuple[ReassessedCriterion, ...]
    final_weighted_total_tenths: int
    final_feedback: str
    provenance: Provenance = Provenance.GENERATED

    def __post_init__(self):
        if not self.entries:
            raise single(AlignmentError(missing=(), extra=()))
        _check_distinct_names([e.criterion_name for e in self.entries])
        _check_total_tenths(self.final_weighted_total_tenths, "final_weighted_total_tenths")
        _require_text(self.final_feedback, "final_feedback")

    def entry_for(self, criterion_name: str) -> ReassessedCriterion:
        key = criterion_name.strip()
        for e in self.entries:
            if e.criterion_name.strip() == key:
                return e
        raise single(AlignmentError(missing=(criterion_name,), extra=()))

    def final_score_vector(self) -> dict[str, int]:
        return {e.criterion_name: e.final_score for e in self.entries}

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "provenance": self.provenance.value,
            "final_weighted_total_tenths": self.final_weighted_total_tenths,
            "final_feedback": self.final_feedback,
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Reassessment":
        return cls(
            provenance=Provenance(data["provenance"]),
            final_weighted_total_tenths=data["final_weighted_total_tenths"],
            final_feedback=data["final_feedback"],
            entries=tuple(ReassessedCriterion.from_dict(e) for e in data["entries"]),
        )


@dataclass(frozen=True)
class ApprovalRecord:
    """One instructor decision at one gate, with the exact edits applied."""

    stage: ApprovalStage
    actor_ref: str
    decided_at: datetime
    edits: tuple = field(default_factory=tuple)  # tuple[DiffEntry, ...]

    def __post_init__(self):
        _require_text(self.actor_ref, "actor_ref")
        object.__setattr__(self, "decided_at", _require_utc(self.decided_at, "decided_at"))
        object.__setattr__(self, "edits", tuple(self.edits))

    def to_dict(self) -> dict:
        return {
            "stage": self.stage.value,
            "actor_ref": self.actor_ref,
            "decided_at": self.decided_at.isoformat(),
            "edits": [e.to_dict() for e in self.edits],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ApprovalRecord":
        from .diff import DiffEntry

        return cls(
            stage=ApprovalStage(data["stage"]),
            actor_ref=data["actor_ref"],
            decided_at=_parse_ts(data["decided_at"]),
            edits=tuple(DiffEntry.from_dict(e) for e in data["edits"]),
        )


@dataclass(frozen=True)
class AssignmentContext:
    """Instructor-supplied source material a case is assessed against.

    ``reveal_initial_scores`` controls whether students may see stage 1
    scores before the case reaches a terminal state.
    """

    assignment_prompt: str
    course_material: str = ""
    syllabus: str | None = None
    reveal_initial_scores: bool = False

    def __post_init__(self):
        _require_text(self.assignment_prompt, "assignment_prompt")

    def to_dict(self) -> dict:
        return {
            "assignment_prompt": self.assignment_prompt,
            "course_material": self.course_material,
            "syllabus": self.syllabus,
            "reveal_initial_scores": self.reveal_initial_scores,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AssignmentContext":
        return cls(
            assignment_prompt=data["assignment_prompt"],
            course_material=data.get("course_material", ""),
            syllabus=data.get("syllabus"),
            reveal_initial_scores=bool(data.get("reveal_initial_scores", False)),
        )


# Artifact kinds that pass through approval gates, keyed for payload routing.
ARTIFACT_TYPES = {
    "rubric": Rubric,
    "initial_assessment": InitialAssessment,
    "question_set": QuestionSet,
    "reassessment": Reassessment,
}


def artifact_kind(artifact: Any) -> str:
    for kind, cls in ARTIFACT_TYPES.items():
        if isinstance(artifact, cls):
            return kind
    raise TypeError(f"not an approvable artifact: {type(artifact).__name__}")
