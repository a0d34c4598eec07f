"""Pure event application, replay, and approval recording.

``apply`` is the single authority on what an event may do to a case. It
re-verifies everything the event claims: the transition is in the table,
the payload parses to a valid artifact, approved artifacts are exactly
the draft plus the recorded edits, and cached totals match what the
scoring engine computes. Replay is a fold of ``apply``, so a stored log
can always be checked against its materialized case.
"""

from __future__ import annotations

from datetime import datetime
from typing import Iterable, Sequence

from .. import scoring
from ..model import validators
from ..model.canonical import canonical_equal
from ..model.diff import DiffEntry, apply_diff, entries_from_payload, parse_path
from ..model.errors import ProtectedFieldError, ValidationError, single
from ..model.types import (
    ApprovalRecord,
    ApprovalStage,
    AssignmentContext,
    FollowUpResponse,
    InitialAssessment,
    Provenance,
    QuestionSet,
    Reassessment,
    Rubric,
    Submission,
)
from .errors import (
    DuplicateResponseError,
    IllegalTransitionError,
    PayloadMismatchError,
    SequenceGapError,
)
from .events import AssessmentCase, CaseEvent, evolve
from .states import CaseState, EventKind, TRANSITIONS

APPROVAL_KINDS = {
    ApprovalStage.RUBRIC: EventKind.RUBRIC_APPROVED,
    ApprovalStage.INITIAL_SCORES: EventKind.SCORES_APPROVED,
    ApprovalStage.QUESTIONS: EventKind.QUESTIONS_APPROVED,
    ApprovalStage.REASSESSMENT: EventKind.REASSESSMENT_APPROVED,
}
STAGE_FOR_KIND = {kind: stage for stage, kind in APPROVAL_KINDS.items()}

DRAFT_STATES = {
    ApprovalStage.RUBRIC: CaseState.RUBRIC_DRAFTED,
    ApprovalStage.INITIAL_SCORES: CaseState.SCORES_DRAFTED,
    ApprovalStage.QUESTIONS: CaseState.QUESTIONS_DRAFTED,
    ApprovalStage.REASSESSMENT: CaseState.REASSESSMENT_DRAFTED,
}

# Document fields the instructor may never edit at a gate; they are
# system-managed (identity, provenance, recomputed totals).
PROTECTED_FIELDS = {
    "schema_version",
    "provenance",
    "rubric_id",
    "assignment_id",
    "version",
    "weighted_total_tenths",
    "final_weighted_total_tenths",
}


def initial_case(event: CaseEvent) -> AssessmentCase:
    """Build the starting case from its CaseCreated event."""
    if event.kind is not EventKind.CASE_CREATED:
        raise PayloadMismatchError("a case starts with a CaseCreated event")
    if event.sequence != 1:
        raise SequenceGapError(expected=1, actual=event.sequence)
    payload = event.payload
    try:
        assignment_id = payload["assignment_id"]
        materials = AssignmentContext.from_dict(payload["materials"])
    except (KeyError, TypeError, ValidationError) as exc:
        raise PayloadMismatchError(f"CaseCreated payload invalid: {exc}") from exc
    return AssessmentCase(
        case_id=event.case_id,
        assignment_id=assignment_id,
        materials=materials,
        state=CaseState.CREATED,
        version=1,
    )


def apply(case: AssessmentCase, event: CaseEvent) -> AssessmentCase:
    """Apply one event to a case, or raise a TransitionError.

    Pure: never mutates its arguments, same inputs give the same output.
    """
    if event.sequence != case.version + 1:
        raise SequenceGapError(expected=case.version + 1, actual=event.sequence)
    if event.case_id != case.case_id:
        raise PayloadMismatchError(
            f"event belongs to case {event.case_id!r}, not {case.case_id!r}"
        )
    if event.kind is EventKind.CASE_CREATED:
        raise IllegalTransitionError(case.state, event.kind)
    key = (case.state, event.kind)
    if key not in TRANSITIONS:
        raise IllegalTransitionError(case.state, event.kind)

    handler = _HANDLERS[event.kind]
    changes = handler(case, event)
    next_state = changes.pop("_state", TRANSITIONS[key])
    return evolve(case, state=next_state, version=event.sequence, **changes)


def replay(events: Iterable[CaseEvent]) -> AssessmentCase:
    """Fold ``apply`` over an ordered event list.

    Errors from ``apply`` are re-raised with ``offending_sequence`` set so
    callers can point at the exact event that failed.
    """
    iterator = iter(events)
    first = next(iterator, None)
    if first is None:
        raise PayloadMismatchError("cannot replay an empty event list")
    case = initial_case(first)
    for event in iterator:
        try:
            case = apply(case, event)
        except Exception as exc:
            exc.offending_sequence = event.sequence
            raise
    return case


def record_approval(
    case: AssessmentCase,
    stage: ApprovalStage,
    actor_ref: str,
    edits: Sequence[DiffEntry] = (),
    *,
    event_id: str,
    occurred_at: datetime,
) -> CaseEvent:
    """Build the *Approved event for ``stage``, applying and revalidating edits.

    The returned event's payload holds the final artifact document and the
    edit diff; ``apply`` will independently re-derive the artifact from the
    draft and the diff and refuse the event if they disagree.
    """
    kind = APPROVAL_KINDS[stage]
    if case.state is not DRAFT_STATES[stage]:
        raise IllegalTransitionError(case.state, kind)
    artifact = approved_artifact(case, stage, tuple(edits))
    return CaseEvent(
        event_id=event_id,
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=kind,
        payload={
            "artifact": artifact.to_dict(),
            "edits": [entry.to_dict() for entry in edits],
        },
        occurred_at=occurred_at,
        actor_ref=actor_ref,
    )


def approved_artifact(case: AssessmentCase, stage: ApprovalStage, edits: tuple[DiffEntry, ...]):
    """The artifact that approval with ``edits`` produces: draft document
    plus edits, revalidated from scratch against the case's context.

    Raises ValidationError when an edit touches a protected field, fails
    to apply, or leaves the document invalid.
    """
    draft = _draft_for(case, stage)
    for entry in edits:
        root = parse_path(entry.path)[0]
        if root in PROTECTED_FIELDS:
            raise single(ProtectedFieldError(path=entry.path))
    document = apply_diff(draft.to_dict(), edits)
    provenance = Provenance.INSTRUCTOR_EDITED if edits else draft.provenance

    if stage is ApprovalStage.RUBRIC:
        rubric: Rubric = draft
        return validators.validate_rubric(
            document,
            rubric_id=rubric.rubric_id,
            assignment_id=rubric.assignment_id,
            provenance=provenance,
            version=rubric.version,
        )
    if stage is ApprovalStage.INITIAL_SCORES:
        return validators.validate_initial_scores(document, case.rubric, provenance=provenance)
    if stage is ApprovalStage.QUESTIONS:
        return validators.validate_question_set(document, case.rubric, provenance=provenance)
    return validators.validate_reassessment(
        document, case.rubric, case.initial, provenance=provenance
    )


def _draft_for(case: AssessmentCase, stage: ApprovalStage):
    draft = {
        ApprovalStage.RUBRIC: case.rubric,
        ApprovalStage.INITIAL_SCORES: case.initial,
        ApprovalStage.QUESTIONS: case.questions,
        ApprovalStage.REASSESSMENT: case.reassessment,
    }[stage]
    if draft is None:
        raise PayloadMismatchError(f"no drafted artifact for stage {stage.value}")
    return draft


def _parse(loader, payload, key: str):
    try:
        return loader(payload[key])
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise PayloadMismatchError(f"payload field {key!r} invalid: {exc}") from exc


def _require_generated(artifact, kind: EventKind) -> None:
    if artifact.provenance is not Provenance.GENERATED:
        raise PayloadMismatchError(
            f"{kind.value} payload must carry provenance 'generated'"
        )


def _on_rubric_generated(case: AssessmentCase, event: CaseEvent) -> dict:
    rubric = _parse(Rubric.from_dict, event.payload, "rubric")
    _require_generated(rubric, event.kind)
    if rubric.assignment_id != case.assignment_id:
        raise PayloadMismatchError("rubric is for a different assignment")
    expected_version = case.rubric.version + 1 if case.state is CaseState.RUBRIC_DRAFTED else 1
    if rubric.version != expected_version:
        raise PayloadMismatchError(
            f"draft rubric version must be {expected_version}, got {rubric.version}"
        )
    return {"rubric": rubric}


def _on_submission_uploaded(case: AssessmentCase, event: CaseEvent) -> dict:
    submission = _parse(Submission.from_dict, event.payload, "submission")
    if submission.case_id != case.case_id:
        raise PayloadMismatchError("submission belongs to a different case")
    return {"submission": submission}


def _on_scores_generated(case: AssessmentCase, event: CaseEvent) -> dict:
    assessment = _parse(InitialAssessment.from_dict, event.payload, "assessment")
    _require_generated(assessment, event.kind)
    _verify_assessment_against(case.rubric, assessment)
    return {"initial": assessment}


def _on_questions_generated(case: AssessmentCase, event: CaseEvent) -> dict:
    questions = _parse(QuestionSet.from_dict, event.payload, "questions")
    _require_generated(questions, event.kind)
    for q in questions.questions:
        if q.target_criterion is not None and not case.rubric.has_criterion(q.target_criterion):
            raise PayloadMismatchError(
                f"question {q.question_id!r} targets unknown criterion {q.target_criterion!r}"
            )
    return {"questions": questions}


def _on_questions_sent(case: AssessmentCase, event: CaseEvent) -> dict:
    sent = event.payload.get("question_ids")
    if sent != list(case.questions.question_ids):
        raise PayloadMismatchError("sent question_ids do not match the approved question set")
    return {"questions_sent": True}


def _on_response_recorded(case: AssessmentCase, event: CaseEvent) -> dict:
    response = _parse(FollowUpResponse.from_dict, event.payload, "response")
    if response.question_id not in case.questions.question_ids:
        raise PayloadMismatchError(
            f"response targets unknown question {response.question_id!r}"
        )
    if response.question_id in case.answered_question_ids():
        raise DuplicateResponseError(response.question_id)
    responses = case.responses + (response,)
    answered = {r.question_id for r in responses}
    changes: dict = {"responses": responses}
    if answered == set(case.questions.question_ids):
        changes["_state"] = CaseState.RESPONSES_RECEIVED
    return changes


def _on_reassessment_generated(case: AssessmentCase, event: CaseEvent) -> dict:
    reassessment = _parse(Reassessment.from_dict, event.payload, "reassessment")
    _require_generated(reassessment, event.kind)
    _verify_reassessment_against(case.rubric, case.initial, reassessment)
    return {"reassessment": reassessment}


def _on_stage2_skip(case: AssessmentCase, event: CaseEvent) -> dict:
    carried = event.payload.get("final_weighted_total_tenths")
    if carried != case.initial.weighted_total_tenths:
        raise PayloadMismatchError(
            "skip must carry the approved initial weighted total unchanged"
        )
    return {}


def _on_approval(case: AssessmentCase, event: CaseEvent) -> dict:
    stage = STAGE_FOR_KIND[event.kind]
    try:
        edits = entries_from_payload(event.payload.get("edits", []))
        expected = approved_artifact(case, stage, edits)
    except ValidationError as exc:
        raise PayloadMismatchError(f"approval edits invalid: {exc}") from exc
    claimed = event.payload.get("artifact")
    if not canonical_equal(claimed, expected.to_dict()):
        raise PayloadMismatchError(
            "approved artifact does not equal the draft with the recorded edits applied"
        )
    record = ApprovalRecord(
        stage=stage,
        actor_ref=event.actor_ref,
        decided_at=event.occurred_at,
        edits=edits,
    )
    field = {
        ApprovalStage.RUBRIC: "rubric",
        ApprovalStage.INITIAL_SCORES: "initial",
        ApprovalStage.QUESTIONS: "questions",
        ApprovalStage.REASSESSMENT: "reassessment",
    }[stage]
    return {field: expected, "approvals": case.approvals + (record,)}


def _verify_assessment_against(rubric: Rubric, assessment: InitialAssessment) -> None:
    try:
        tenths = scoring.weighted_total_tenths(rubric, assessment.score_vector())
    except ValidationError as exc:
        raise PayloadMismatchError(f"scores do not align with the rubric: {exc}") from exc
    if tenths != assessment.weighted_total_tenths:
        raise PayloadMismatchError(
            f"claimed weighted total {assessment.weighted_total_tenths} != computed {tenths}"
        )


def _verify_reassessment_against(
    rubric: Rubric, initial: InitialAssessment, reassessment: Reassessment
) -> None:
    try:
        tenths = scoring.weighted_total_tenths(rubric, reassessment.final_score_vector())
    except ValidationError as exc:
        raise PayloadMismatchError(f"entries do not align with the rubric: {exc}") from exc
    if tenths != reassessment.final_weighted_total_tenths:
        raise PayloadMismatchError(
            f"claimed final total {reassessment.final_weighted_total_tenths} != computed {tenths}"
        )
    for entry in reassessment.entries:
        approved = initial.score_for(entry.criterion_name)
        if approved.score != entry.initial_score:
            raise PayloadMismatchError(
                f"entry for {entry.criterion_name!r} claims initial score "
                f"{entry.initial_score}, approved assessment says {approved.score}"
            )


_HANDLERS = {
    EventKind.RUBRIC_GENERATED: _on_rubric_generated,
    EventKind.RUBRIC_APPROVED: _on_approval,
    EventKind.SUBMISSION_UPLOADED: _on_submission_uploaded,
    EventKind.SCORES_GENERATED: _on_scores_generated,
    EventKind.SCORES_APPROVED: _on_approval,
    EventKind.QUESTIONS_GENERATED: _on_questions_generated,
    EventKind.QUESTIONS_APPROVED: _on_approval,
    EventKind.QUESTIONS_SENT: _on_questions_sent,
    EventKind.RESPONSE_RECORDED: _on_response_recorded,
    EventKind.REASSESSMENT_GENERATED: _on_reassessment_generated,
    EventKind.REASSESSMENT_APPROVED: _on_approval,
    EventKind.STAGE2_SKIP_REQUESTED: _on_stage2_skip,
}


def make_created_event(
    *,
    event_id: str,
    case_id: str,
    assignment_id: str,
    materials: AssignmentContext,
    occurred_at: datetime,
    actor_ref: str,
) -> CaseEvent:
    return CaseEvent(
        event_id=event_id,
        case_id=case_id,
        sequence=1,
        kind=EventKind.CASE_CREATED,
        payload={"assignment_id": assignment_id, "materials": materials.to_dict()},
        occurred_at=occurred_at,
        actor_ref=actor_ref,
    )


_GENERATED_PAYLOAD_KEYS = {
    EventKind.RUBRIC_GENERATED: "rubric",
    EventKind.SCORES_GENERATED: "assessment",
    EventKind.QUESTIONS_GENERATED: "questions",
    EventKind.REASSESSMENT_GENERATED: "reassessment",
}


def make_generated_event(
    case: AssessmentCase,
    kind: EventKind,
    artifact,
    *,
    event_id: str,
    occurred_at: datetime,
    actor_ref: str,
) -> CaseEvent:
    key = _GENERATED_PAYLOAD_KEYS[kind]
    return CaseEvent(
        event_id=event_id,
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=kind,
        payload={key: artifact.to_dict()},
        occurred_at=occurred_at,
        actor_ref=actor_ref,
    )


def make_submission_event(
    case: AssessmentCase,
    submission: Submission,
    *,
    event_id: str,
    occurred_at: datetime,
    actor_ref: str,
) -> CaseEvent:
    return CaseEvent(
        event_id=event_id,
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=EventKind.SUBMISSION_UPLOADED,
        payload={"submission": submission.to_dict()},
        occurred_at=occurred_at,
        actor_ref=actor_ref,
    )


def make_questions_sent_event(
    case: AssessmentCase, *, event_id: str, occurred_at: datetime, actor_ref: str
) -> CaseEvent:
    if case.questions is None:
        raise PayloadMismatchError("no approved question set to send")
    return CaseEvent(
        event_id=event_id,
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=EventKind.QUESTIONS_SENT,
        payload={"question_ids": list(case.questions.question_ids)},
        occurred_at=occurred_at,
        actor_ref=actor_ref,
    )


def make_response_event(
    case: AssessmentCase,
    response: FollowUpResponse,
    *,
    event_id: str,
    occurred_at: datetime,
    actor_ref: str,
) -> CaseEvent:
    return CaseEvent(
        event_id=event_id,
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=EventKind.RESPONSE_RECORDED,
        payload={"response": response.to_dict()},
        occurred_at=occurred_at,
        actor_ref=actor_ref,
    )


def make_skip_event(
    case: AssessmentCase, *, event_id: str, occurred_at: datetime, actor_ref: str
) -> CaseEvent:
    if case.initial is None:
        raise PayloadMismatchError("cannot skip stage 2 before scores are approved")
    return CaseEvent(
        event_id=event_id,
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=EventKind.STAGE2_SKIP_REQUESTED,
        payload={"final_weighted_total_tenths": case.initial.weighted_total_tenths},
        occurred_at=occurred_at,
        actor_ref=actor_ref,
    )
