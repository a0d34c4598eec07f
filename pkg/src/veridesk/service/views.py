"""Role-scoped projections of a case.

Instructors get the full materialized document plus what they can do
next. Students get a deliberately narrow window: sent questions, their
own responses, and the final outcome; initial scores stay hidden until
the case settles unless the assignment opts into revealing them.
"""

from __future__ import annotations

from .. import scoring
from ..model.types import ApprovalStage
from ..workflow.events import AssessmentCase
from ..workflow.states import allowed_actions


def instructor_view(case: AssessmentCase) -> dict:
    document = case.to_dict()
    document["allowed_actions"] = sorted(k.value for k in allowed_actions(case.state))
    document["terminal"] = case.terminal
    total = case.final_weighted_total_tenths()
    document["final_weighted_total_tenths"] = total
    document["final_weighted_total_display"] = (
        scoring.format_tenths(total) if total is not None else None
    )
    return document


def student_view(case: AssessmentCase, actor_ref: str) -> dict:
    """What the submission's author may see of their own case."""
    questions = []
    if case.questions_sent and case.questions is not None:
        questions = [
            {"question_id": q.question_id, "kind": q.kind.value, "text": q.text}
            for q in case.questions.questions
        ]
    responses = [
        {
            "question_id": r.question_id,
            "body": r.body,
            "received_at": r.received_at.isoformat(),
        }
        for r in case.responses
    ]

    unanswered = (
        [q["question_id"] for q in questions]
        and set(q["question_id"] for q in questions) - case.answered_question_ids()
    )
    if case.terminal:
        status = "complete"
    elif case.questions_sent and unanswered:
        status = "awaiting_your_responses"
    else:
        status = "in_progress"

    view = {
        "view": "student",
        "case_id": case.case_id,
        "assignment_id": case.assignment_id,
        "status": status,
        "questions": questions,
        "responses": responses,
        "initial_scores": None,
        "final": None,
    }

    scores_approved = case.approval_for(ApprovalStage.INITIAL_SCORES) is not None
    if scores_approved and (case.materials.reveal_initial_scores or case.terminal):
        view["initial_scores"] = {
            "scores": [s.to_dict() for s in case.initial.scores],
            "weighted_total_tenths": case.initial.weighted_total_tenths,
            "weighted_total_display": scoring.format_tenths(
                case.initial.weighted_total_tenths
            ),
        }

    if case.terminal:
        total = case.final_weighted_total_tenths()
        if case.reassessment is not None:
            final_scores = [
                {"criterion_name": e.criterion_name, "final_score": e.final_score}
                for e in case.reassessment.entries
            ]
            feedback = case.reassessment.final_feedback
        else:
            final_scores = [
                {"criterion_name": s.criterion_name, "final_score": s.score}
                for s in case.initial.scores
            ]
            feedback = None
        view["final"] = {
            "feedback": feedback,
            "scores": final_scores,
            "weighted_total_tenths": total,
            "weighted_total_display": scoring.format_tenths(total),
        }
    return view
