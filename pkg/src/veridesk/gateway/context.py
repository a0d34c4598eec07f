"""Generation tasks and the context each one needs."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..model.types import (
    FollowUpQuestion,
    FollowUpResponse,
    InitialAssessment,
    Rubric,
    Submission,
)
from ..workflow.events import AssessmentCase
from .errors import MissingContextError


class Task(str, Enum):
    RUBRIC_GENERATION = "rubric_generation"
    AUTO_SCORING = "auto_scoring"
    QUESTION_DRAFTING = "question_drafting"
    REASSESSMENT = "reassessment"


# Context fields each task must have, cumulative down the pipeline.
REQUIRED_FIELDS: dict[Task, tuple[str, ...]] = {
    Task.RUBRIC_GENERATION: ("course_material", "assignment_prompt"),
    Task.AUTO_SCORING: ("course_material", "assignment_prompt", "rubric", "submission"),
    Task.QUESTION_DRAFTING: (
        "course_material",
        "assignment_prompt",
        "rubric",
        "submission",
        "initial",
    ),
    Task.REASSESSMENT: (
        "course_material",
        "assignment_prompt",
        "rubric",
        "submission",
        "initial",
        "qa_pairs",
    ),
}


@dataclass(frozen=True)
class ContextBundle:
    """Everything a prompt may draw on. Absent pieces are None.

    The syllabus rides along only for rubric generation; later stages
    work from the approved rubric instead.
    """

    course_material: str
    assignment_prompt: str
    syllabus: str | None = None
    rubric: Rubric | None = None
    submission: Submission | None = None
    initial: InitialAssessment | None = None
    qa_pairs: tuple[tuple[FollowUpQuestion, FollowUpResponse], ...] | None = None

    def require_for(self, task: Task) -> None:
        missing = [name for name in REQUIRED_FIELDS[task] if not getattr(self, name)]
        if missing:
            raise MissingContextError(task.value, missing)


def context_from_case(task: Task, case: AssessmentCase) -> ContextBundle:
    """Assemble the bundle a task needs from the case's current artifacts."""
    qa_pairs = None
    if task is Task.REASSESSMENT and case.questions is not None:
        by_id = {r.question_id: r for r in case.responses}
        qa_pairs = tuple(
            (question, by_id[question.question_id])
            for question in case.questions.questions
            if question.question_id in by_id
        )
    bundle = ContextBundle(
        course_material=case.materials.course_material,
        assignment_prompt=case.materials.assignment_prompt,
        syllabus=case.materials.syllabus if task is Task.RUBRIC_GENERATION else None,
        rubric=case.rubric,
        submission=case.submission,
        initial=case.initial,
        qa_pairs=qa_pairs,
    )
    bundle.require_for(task)
    return bundle
