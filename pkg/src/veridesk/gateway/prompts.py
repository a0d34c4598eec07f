"""Deterministic prompt rendering from versioned template files."""

from __future__ import annotations

import json
from importlib import resources
from string import Template

from ..model.canonical import canonical_json
from .context import ContextBundle, Task

TEMPLATE_VERSION = "v1"
# The line MockProvider keys its routing on; every template carries one.
TASK_MARKER_PREFIX = "task: "


def template_text(task: Task, version: str = TEMPLATE_VERSION) -> str:
    name = f"{task.value}_{version}.txt"
    return resources.files("veridesk.gateway.templates").joinpath(name).read_text("utf-8")


def render_prompt(task: Task, context: ContextBundle, version: str = TEMPLATE_VERSION) -> str:
    """Pure function of (task, context, version): same inputs, same bytes."""
    context.require_for(task)
    values = {
        "course_material": context.course_material,
        "assignment_prompt": context.assignment_prompt,
    }
    if task is Task.RUBRIC_GENERATION:
        values["syllabus_section"] = (
            f"\n## Syllabus\n{context.syllabus}\n" if context.syllabus else ""
        )
    if task in (Task.AUTO_SCORING, Task.QUESTION_DRAFTING, Task.REASSESSMENT):
        values["rubric_json"] = canonical_json(context.rubric.to_dict())
        values["submission_body"] = context.submission.body
    if task in (Task.QUESTION_DRAFTING, Task.REASSESSMENT):
        values["initial_json"] = canonical_json(context.initial.to_dict())
    if task is Task.REASSESSMENT:
        values["qa_pairs_block"] = format_qa_pairs(context.qa_pairs)
    return Template(template_text(task, version)).substitute(values)


def format_qa_pairs(qa_pairs) -> str:
    blocks = []
    for question, response in qa_pairs:
        header = f"[{question.question_id}] ({question.kind.value}"
        if question.target_criterion:
            header += f", targets {question.target_criterion}"
        header += ")"
        blocks.append(f"{header}\nQ: {question.text}\nA: {response.body}")
    return "\n\n".join(blocks)


def task_from_prompt(prompt: str) -> Task | None:
    """Recover the task marker a template embedded, for mock routing."""
    for line in prompt.splitlines():
        if line.startswith(TASK_MARKER_PREFIX):
            try:
                return Task(line[len(TASK_MARKER_PREFIX):].strip())
            except ValueError:
                return None
    return None


def repair_prompt(base_prompt: str, violations: list[dict], offending_output: str) -> str:
    """Re-prompt after a validation failure: original request plus the
    machine-readable error list and the output that caused it."""
    error_lines = json.dumps(violations, indent=2, ensure_ascii=False)
    return (
        f"{base_prompt}\n\n"
        "## Previous attempt rejected\n"
        "Your previous reply failed validation. Fix every error listed and "
        "reply again with only the corrected JSON object.\n\n"
        f"Validation errors:\n{error_lines}\n\n"
        f"Previous reply:\n{offending_output}\n"
    )
