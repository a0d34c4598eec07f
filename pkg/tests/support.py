"""Shared helpers for the test suite.

The fixture pipeline here mirrors one full assessment: a five-criterion
rubric, a scored submission, two follow-up questions, answers, and a
reassessment that raises two criteria. The numbers are chosen so the
initial weighted total is 71.0 and the final is 81.0.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from veridesk.model.types import AssignmentContext
from veridesk.runtime import CounterIdSource, FixedClock
from veridesk.service.app import CaseService
from veridesk.gateway.generate import GatewayConfig
from veridesk.gateway.providers import MockProvider
from veridesk.store.store import EventStore

FIXTURES = Path(__file__).parent / "fixtures"

PILOT_CRITERIA = (
    ("Evidence Use", 25),
    ("Claim", 20),
    ("Historical Context", 15),
    ("Reasoning & Analysis", 25),
    ("Organization & Clarity", 15),
)
PILOT_INITIAL_SCORES = (3, 3, 4, 4, 4)
PILOT_FINAL_SCORES = (4, 3, 4, 5, 4)
PILOT_INITIAL_TENTHS = 710
PILOT_FINAL_TENTHS = 810


def load_pilot_script() -> dict[str, list[str]]:
    """The mock-provider script as the provider consumes it (raw strings)."""
    document = json.loads((FIXTURES / "pilot_script.json").read_text(encoding="utf-8"))
    return {
        task: [json.dumps(entry) if not isinstance(entry, str) else entry for entry in entries]
        for task, entries in document.items()
    }


def pilot_documents() -> dict[str, dict]:
    """First scripted document per task, parsed."""
    document = json.loads((FIXTURES / "pilot_script.json").read_text(encoding="utf-8"))
    return {task: entries[0] for task, entries in document.items()}


def pilot_materials() -> AssignmentContext:
    assignment = json.loads((FIXTURES / "assignment.json").read_text(encoding="utf-8"))
    course = (FIXTURES / "materials" / "reading.txt").read_text(encoding="utf-8")
    syllabus = (FIXTURES / "materials" / "syllabus.txt").read_text(encoding="utf-8")
    return AssignmentContext(
        assignment_prompt=assignment["prompt"],
        course_material=course.strip(),
        syllabus=syllabus,
        reveal_initial_scores=assignment.get("reveal_initial_scores", False),
    )


def pilot_submission_body() -> str:
    return (FIXTURES / "submissions" / "stu-001.txt").read_text(encoding="utf-8")


def pilot_responses() -> dict[str, str]:
    return json.loads((FIXTURES / "responses.json").read_text(encoding="utf-8"))


def make_service(
    script: dict[str, list[str]] | None = None,
    *,
    store: EventStore | None = None,
    store_path: str = ":memory:",
    max_attempts: int = 3,
) -> CaseService:
    """Deterministic service over an in-memory (or given) store."""
    clock = FixedClock()
    if store is None:
        store = EventStore(store_path, clock=clock)
    provider = MockProvider(script if script is not None else load_pilot_script())
    return CaseService(
        store=store,
        provider=provider,
        gateway_config=GatewayConfig(max_attempts=max_attempts),
        clock=clock,
        ids=CounterIdSource(),
    )


STAGE_SEQUENCE = (
    "created",
    "rubric_drafted",
    "rubric_approved",
    "submission_received",
    "scores_drafted",
    "scores_approved",
    "questions_drafted",
    "questions_approved",
    "awaiting_responses",
    "responses_received",
    "reassessment_drafted",
    "finalized",
)


def drive_pilot(
    service: CaseService,
    *,
    to: str = "finalized",
    assignment_id: str = "hist-201-essay-2",
    author_ref: str = "stu-001",
    actor: str = "instructor",
):
    """Create a case and walk it toward ``to``; returns the case id.

    ``to`` is one of STAGE_SEQUENCE or "stage2_skipped".
    """
    steps = STAGE_SEQUENCE.index("finalized" if to == "stage2_skipped" else to)
    case = service.create_case(assignment_id, pilot_materials(), actor_ref=actor)
    case_id = case.case_id
    responses = pilot_responses()

    def at(stage: str) -> bool:
        return steps >= STAGE_SEQUENCE.index(stage)

    if at("rubric_drafted"):
        service.generate_rubric(case_id)
    if at("rubric_approved"):
        service.approve_rubric(case_id, actor)
    if at("submission_received"):
        service.upload_submission(case_id, author_ref, pilot_submission_body(), actor_ref=actor)
    if at("scores_drafted"):
        service.generate_scores(case_id)
    if at("scores_approved"):
        service.approve_scores(case_id, actor)
    if to == "stage2_skipped":
        service.skip_stage2(case_id, actor_ref=actor)
        return case_id
    if at("questions_drafted"):
        service.generate_questions(case_id)
    if at("questions_approved"):
        service.approve_questions(case_id, actor)
    if at("awaiting_responses"):
        service.send_questions(case_id, actor_ref=actor)
    if at("responses_received"):
        for question_id, body in responses.items():
            service.record_response(case_id, question_id, body)
    if at("reassessment_drafted"):
        service.generate_reassessment(case_id)
    if at("finalized"):
        service.approve_reassessment(case_id, actor)
    return case_id


def level_doc(ordinal: int) -> dict:
    return {"level": ordinal, "desc": f"performance band {ordinal}"}


def criterion_doc(name: str, weight: int) -> dict:
    return {
        "criterion_name": name,
        "weight": weight,
        "description": f"how well the work handles {name.lower()}",
        "levels": [level_doc(i) for i in range(1, 6)],
    }


def rubric_doc(weights: dict[str, int]) -> dict:
    """A generated-rubric document as a provider would emit it."""
    return {"criteria": [criterion_doc(name, weight) for name, weight in weights.items()]}


def make_rubric(weights: dict[str, int], rubric_id: str = "rub-1", assignment_id: str = "a-1"):
    from veridesk.model.types import Criterion, PerformanceLevel, Rubric

    return Rubric(
        rubric_id=rubric_id,
        assignment_id=assignment_id,
        criteria=tuple(
            Criterion(
                name=name,
                weight=weight,
                description=f"how well the work handles {name.lower()}",
                levels=tuple(PerformanceLevel(i, f"band {i}") for i in range(1, 6)),
            )
            for name, weight in weights.items()
        ),
    )


def random_weights(rng, count: int) -> list[int]:
    """``count`` positive integers summing to 100 (requires count <= 100)."""
    cuts = sorted(rng.sample(range(1, 100), count - 1)) if count > 1 else []
    bounds = [0, *cuts, 100]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def oracle_total_tenths(weights: list[int], scores: list[int]) -> int:
    """Independent total: exact rational percent-of-maximum, in tenths.

    total = (sum(w*s) / (5 * sum(w))) * 100 points, expressed in tenths of
    a point. Computed entirely with Fraction, then asserted integral.
    """
    numerator = sum(w * s for w, s in zip(weights, scores))
    points = Fraction(numerator * 100, 5 * sum(weights))
    tenths = points * 10
    assert tenths.denominator == 1
    return int(tenths)
