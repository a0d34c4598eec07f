"""Event and case records for the event-sourced workflow."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Mapping

from ..model.types import (
    ApprovalRecord,
    ApprovalStage,
    AssignmentContext,
    FollowUpResponse,
    InitialAssessment,
    QuestionSet,
    Reassessment,
    Rubric,
    SCHEMA_VERSION,
    Submission,
)
from .states import CaseState, EventKind, TERMINAL_STATES


@dataclass(frozen=True)
class CaseEvent:
    """One immutable fact about a case.

    ``payload`` is the event's document-form attachment (artifact, diff,
    or reference data); its required shape depends on ``kind`` and is
    enforced by the engine on application.
    """

    event_id: str
    case_id: str
    sequence: int
    kind: EventKind
    payload: Mapping[str, Any]
    occurred_at: datetime
    actor_ref: str

    def __post_init__(self):
        if self.sequence < 1:
            raise ValueError("event sequence starts at 1")
        if self.occurred_at.tzinfo is None:
            raise ValueError("occurred_at must be timezone-aware")
        object.__setattr__(self, "occurred_at", self.occurred_at.astimezone(timezone.utc))
        object.__setattr__(self, "payload", dict(self.payload))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "event_id": self.event_id,
            "case_id": self.case_id,
            "sequence": self.sequence,
            "kind": self.kind.value,
            "payload": self.payload,
            "occurred_at": self.occurred_at.isoformat(),
            "actor_ref": self.actor_ref,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CaseEvent":
        return cls(
            event_id=data["event_id"],
            case_id=data["case_id"],
            sequence=data["sequence"],
            kind=EventKind(data["kind"]),
            payload=data["payload"],
            occurred_at=datetime.fromisoformat(data["occurred_at"]),
            actor_ref=data["actor_ref"],
        )


def _opt(value, loader):
    return None if value is None else loader(value)


@dataclass(frozen=True)
class AssessmentCase:
    """Materialized view of one submission's journey, rebuilt by replay.

    ``version`` counts applied events; it is the optimistic-concurrency
    token writers must present when appending.
    """

    case_id: str
    assignment_id: str
    materials: AssignmentContext
    state: CaseState = CaseState.CREATED
    version: int = 0
    rubric: Rubric | None = None
    submission: Submission | None = None
    initial: InitialAssessment | None = None
    questions: QuestionSet | None = None
    questions_sent: bool = False
    responses: tuple[FollowUpResponse, ...] = ()
    reassessment: Reassessment | None = None
    approvals: tuple[ApprovalRecord, ...] = field(default_factory=tuple)

    @property
    def terminal(self) -> bool:
        return self.state in TERMINAL_STATES

    def approval_for(self, stage: ApprovalStage) -> ApprovalRecord | None:
        for record in self.approvals:
            if record.stage is stage:
                return record
        return None

    @property
    def approved_stages(self) -> frozenset[ApprovalStage]:
        return frozenset(record.stage for record in self.approvals)

    def answered_question_ids(self) -> frozenset[str]:
        return frozenset(r.question_id for r in self.responses)

    def final_weighted_total_tenths(self) -> int | None:
        """The case's settled total: the reassessment's when stage 2 ran,
        the initial assessment's when it was skipped, None before then."""
        if self.state is CaseState.FINALIZED and self.reassessment is not None:
            return self.reassessment.final_weighted_total_tenths
        if self.state is CaseState.STAGE2_SKIPPED and self.initial is not None:
            return self.initial.weighted_total_tenths
        return None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "case_id": self.case_id,
            "assignment_id": self.assignment_id,
            "materials": self.materials.to_dict(),
            "state": self.state.value,
            "version": self.version,
            "rubric": self.rubric.to_dict() if self.rubric else None,
            "submission": self.submission.to_dict() if self.submission else None,
            "initial": self.initial.to_dict() if self.initial else None,
            "questions": self.questions.to_dict() if self.questions else None,
            "questions_sent": self.questions_sent,
            "responses": [r.to_dict() for r in self.responses],
            "reassessment": self.reassessment.to_dict() if self.reassessment else None,
            "approvals": [a.to_dict() for a in self.approvals],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AssessmentCase":
        return cls(
            case_id=data["case_id"],
            assignment_id=data["assignment_id"],
            materials=AssignmentContext.from_dict(data["materials"]),
            state=CaseState(data["state"]),
            version=data["version"],
            rubric=_opt(data.get("rubric"), Rubric.from_dict),
            submission=_opt(data.get("submission"), Submission.from_dict),
            initial=_opt(data.get("initial"), InitialAssessment.from_dict),
            questions=_opt(data.get("questions"), QuestionSet.from_dict),
            questions_sent=bool(data.get("questions_sent", False)),
            responses=tuple(
                FollowUpResponse.from_dict(r) for r in data.get("responses", [])
            ),
            reassessment=_opt(data.get("reassessment"), Reassessment.from_dict),
            approvals=tuple(
                ApprovalRecord.from_dict(a) for a in data.get("approvals", [])
            ),
        )


def evolve(case: AssessmentCase, **changes) -> AssessmentCase:
    return replace(case, **changes)
