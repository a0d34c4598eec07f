"""Human- and machine-readable case reports.

The markdown layout follows the instructor console: per-criterion rows
showing the movement from initial to final score with its rationale,
then the overall totals and final feedback.
"""

from __future__ import annotations

from .. import scoring
from ..workflow.events import AssessmentCase

NOT_YET = "not yet generated"


def report_document(case: AssessmentCase) -> dict:
    """JSON report: everything a gradebook integration would want."""
    rubric = None
    if case.rubric is not None:
        rubric = {
            "rubric_id": case.rubric.rubric_id,
            "version": case.rubric.version,
            "provenance": case.rubric.provenance.value,
            "criteria": [
                {"criterion_name": c.name, "weight": c.weight, "description": c.description}
                for c in case.rubric.criteria
            ],
        }

    initial = None
    if case.initial is not None:
        initial = {
            "provenance": case.initial.provenance.value,
            "scores": [s.to_dict() for s in case.initial.scores],
            "weighted_total_tenths": case.initial.weighted_total_tenths,
            "weighted_total_display": scoring.format_tenths(case.initial.weighted_total_tenths),
        }

    questions = None
    if case.questions is not None:
        answered = {r.question_id: r for r in case.responses}
        questions = [
            {
                "question_id": q.question_id,
                "kind": q.kind.value,
                "target_criterion": q.target_criterion,
                "text": q.text,
                "response": answered[q.question_id].body if q.question_id in answered else None,
            }
            for q in case.questions.questions
        ]

    reassessment = None
    if case.reassessment is not None:
        reassessment = {
            "provenance": case.reassessment.provenance.value,
            "entries": [e.to_dict() for e in case.reassessment.entries],
            "final_weighted_total_tenths": case.reassessment.final_weighted_total_tenths,
            "final_weighted_total_display": scoring.format_tenths(
                case.reassessment.final_weighted_total_tenths
            ),
            "final_feedback": case.reassessment.final_feedback,
        }

    total = case.final_weighted_total_tenths()
    return {
        "case_id": case.case_id,
        "assignment_id": case.assignment_id,
        "state": case.state.value,
        "rubric": rubric,
        "initial_assessment": initial,
        "questions": questions,
        "reassessment": reassessment,
        "final_weighted_total_tenths": total,
        "final_weighted_total_display": scoring.format_tenths(total) if total is not None else None,
    }


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(headers) + " |"]
    lines.append("|" + "|".join(" --- " for _ in headers) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return lines


def report_markdown(case: AssessmentCase) -> str:
    lines: list[str] = [f"# Assessment report: {case.case_id}", ""]
    lines.append(f"- Assignment: {case.assignment_id}")
    lines.append(f"- State: {case.state.value}")
    lines.append("")

    lines.append("## Rubric")
    if case.rubric is None:
        lines.append(f"_Rubric: {NOT_YET}._")
    else:
        lines.append(
            f"Version {case.rubric.version}, {case.rubric.provenance.value.replace('_', ' ')}."
        )
        lines.append("")
        lines.extend(
            _table(
                ["Criterion", "Weight", "Description"],
                [[c.name, str(c.weight), c.description] for c in case.rubric.criteria],
            )
        )
    lines.append("")

    lines.append("## Initial assessment")
    if case.initial is None:
        lines.append(f"_Initial assessment: {NOT_YET}._")
    else:
        lines.extend(
            _table(
                ["Criterion", "Score", "Justification"],
                [
                    [s.criterion_name, str(s.score), s.justification]
                    for s in case.initial.scores
                ],
            )
        )
        lines.append("")
        lines.append(
            f"Weighted total: {scoring.format_tenths(case.initial.weighted_total_tenths)}"
        )
    lines.append("")

    lines.append("## Follow-up questions")
    if case.questions is None:
        lines.append(f"_Follow-up questions: {NOT_YET}._")
    else:
        answered = {r.question_id: r for r in case.responses}
        for q in case.questions.questions:
            target = f" → {q.target_criterion}" if q.target_criterion else ""
            lines.append(f"- [{q.question_id}] ({q.kind.value}{target}) {q.text}")
            if q.question_id in answered:
                lines.append(f"  - Response: {answered[q.question_id].body}")
            else:
                lines.append("  - Response: not yet received")
    lines.append("")

    lines.append("## Reassessment")
    if case.reassessment is None:
        lines.append(f"_Reassessment: {NOT_YET}._")
    else:
        rows = []
        for e in case.reassessment.entries:
            movement = f"{e.initial_score} → {e.final_score}"
            delta = f"{e.delta:+d}" if e.delta else "0"
            rows.append([e.criterion_name, movement, delta, e.rationale])
        lines.extend(_table(["Criterion", "Score", "Change", "Rationale"], rows))
        lines.append("")
        lines.append(
            "Final weighted total: "
            f"{scoring.format_tenths(case.reassessment.final_weighted_total_tenths)}"
        )
        lines.append("")
        lines.append("## Final feedback")
        lines.append(case.reassessment.final_feedback)

    total = case.final_weighted_total_tenths()
    if case.reassessment is None and total is not None:
        lines.append("")
        lines.append(
            f"Final weighted total (stage 2 skipped): {scoring.format_tenths(total)}"
        )
    lines.append("")
    return "\n".join(lines)
