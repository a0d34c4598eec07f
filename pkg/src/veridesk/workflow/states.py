"""Case states, event kinds, and the legal transition table."""

from __future__ import annotations

from enum import Enum


class CaseState(str, Enum):
    CREATED = "Created"
    RUBRIC_DRAFTED = "RubricDrafted"
    RUBRIC_APPROVED = "RubricApproved"
    SUBMISSION_RECEIVED = "SubmissionReceived"
    SCORES_DRAFTED = "ScoresDrafted"
    SCORES_APPROVED = "ScoresApproved"
    QUESTIONS_DRAFTED = "QuestionsDrafted"
    QUESTIONS_APPROVED = "QuestionsApproved"
    AWAITING_RESPONSES = "AwaitingResponses"
    RESPONSES_RECEIVED = "ResponsesReceived"
    REASSESSMENT_DRAFTED = "ReassessmentDrafted"
    FINALIZED = "Finalized"
    STAGE2_SKIPPED = "Stage2Skipped"


class EventKind(str, Enum):
    CASE_CREATED = "CaseCreated"
    RUBRIC_GENERATED = "RubricGenerated"
    RUBRIC_APPROVED = "RubricApproved"
    SUBMISSION_UPLOADED = "SubmissionUploaded"
    SCORES_GENERATED = "ScoresGenerated"
    SCORES_APPROVED = "ScoresApproved"
    QUESTIONS_GENERATED = "QuestionsGenerated"
    QUESTIONS_APPROVED = "QuestionsApproved"
    QUESTIONS_SENT = "QuestionsSent"
    RESPONSE_RECORDED = "ResponseRecorded"
    REASSESSMENT_GENERATED = "ReassessmentGenerated"
    REASSESSMENT_APPROVED = "ReassessmentApproved"
    STAGE2_SKIP_REQUESTED = "Stage2SkipRequested"


TERMINAL_STATES = frozenset({CaseState.FINALIZED, CaseState.STAGE2_SKIPPED})

# Progress ordinal per state; legal sequences never decrease it. The two
# terminal states share the top rank on their respective routes.
STATE_ORDER = {
    CaseState.CREATED: 0,
    CaseState.RUBRIC_DRAFTED: 1,
    CaseState.RUBRIC_APPROVED: 2,
    CaseState.SUBMISSION_RECEIVED: 3,
    CaseState.SCORES_DRAFTED: 4,
    CaseState.SCORES_APPROVED: 5,
    CaseState.QUESTIONS_DRAFTED: 6,
    CaseState.QUESTIONS_APPROVED: 7,
    CaseState.AWAITING_RESPONSES: 8,
    CaseState.RESPONSES_RECEIVED: 9,
    CaseState.REASSESSMENT_DRAFTED: 10,
    CaseState.FINALIZED: 11,
    CaseState.STAGE2_SKIPPED: 11,
}

# (state, kind) -> next state. Regenerating while a draft is pending is a
# legal self-loop: the new draft replaces the old and both stay in the log.
# ResponseRecorded maps to AwaitingResponses here; apply() advances to
# ResponsesReceived once every approved question has a response.
TRANSITIONS: dict[tuple[CaseState, EventKind], CaseState] = {
    (CaseState.CREATED, EventKind.RUBRIC_GENERATED): CaseState.RUBRIC_DRAFTED,
    (CaseState.RUBRIC_DRAFTED, EventKind.RUBRIC_GENERATED): CaseState.RUBRIC_DRAFTED,
    (CaseState.RUBRIC_DRAFTED, EventKind.RUBRIC_APPROVED): CaseState.RUBRIC_APPROVED,
    (CaseState.RUBRIC_APPROVED, EventKind.SUBMISSION_UPLOADED): CaseState.SUBMISSION_RECEIVED,
    (CaseState.SUBMISSION_RECEIVED, EventKind.SCORES_GENERATED): CaseState.SCORES_DRAFTED,
    (CaseState.SCORES_DRAFTED, EventKind.SCORES_GENERATED): CaseState.SCORES_DRAFTED,
    (CaseState.SCORES_DRAFTED, EventKind.SCORES_APPROVED): CaseState.SCORES_APPROVED,
    (CaseState.SCORES_APPROVED, EventKind.QUESTIONS_GENERATED): CaseState.QUESTIONS_DRAFTED,
    (CaseState.SCORES_APPROVED, EventKind.STAGE2_SKIP_REQUESTED): CaseState.STAGE2_SKIPPED,
    (CaseState.QUESTIONS_DRAFTED, EventKind.QUESTIONS_GENERATED): CaseState.QUESTIONS_DRAFTED,
    (CaseState.QUESTIONS_DRAFTED, EventKind.QUESTIONS_APPROVED): CaseState.QUESTIONS_APPROVED,
    (CaseState.QUESTIONS_APPROVED, EventKind.QUESTIONS_SENT): CaseState.AWAITING_RESPONSES,
    (CaseState.AWAITING_RESPONSES, EventKind.RESPONSE_RECORDED): CaseState.AWAITING_RESPONSES,
    (CaseState.RESPONSES_RECEIVED, EventKind.REASSESSMENT_GENERATED): CaseState.REASSESSMENT_DRAFTED,
    (CaseState.REASSESSMENT_DRAFTED, EventKind.REASSESSMENT_GENERATED): CaseState.REASSESSMENT_DRAFTED,
    (CaseState.REASSESSMENT_DRAFTED, EventKind.REASSESSMENT_APPROVED): CaseState.FINALIZED,
}


def allowed_actions(state: CaseState) -> frozenset[EventKind]:
    """Event kinds that may legally be applied in ``state``.

    Terminal states allow nothing. CaseCreated never appears: it starts a
    case rather than advancing one.
    """
    return frozenset(kind for (s, kind) in TRANSITIONS if s is state)
