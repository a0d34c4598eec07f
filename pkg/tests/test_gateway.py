"""Generation gateway: prompt rendering, scripted provider, and the bounded
repair loop that no invalid artifact can escape."""

from __future__ import annotations

import json
from datetime import datetime, timezone

import pytest

from support import make_rubric, rubric_doc
from veridesk.gateway.context import ContextBundle, Task, context_from_case
from veridesk.gateway.errors import (
    MissingContextError,
    ProviderError,
    SchemaFailureExhaustedError,
)
from veridesk.gateway.generate import (
    Gateway,
    GatewayConfig,
    extract_json,
    generate,
    reassess_guard,
)
from veridesk.gateway.prompts import (
    TASK_MARKER_PREFIX,
    render_prompt,
    repair_prompt,
    task_from_prompt,
    template_text,
)
from veridesk.gateway.providers import MockProvider
from veridesk.model.errors import ValidationError
from veridesk.model.types import (
    CriterionScore,
    InitialAssessment,
    Provenance,
    Reassessment,
    ReassessedCriterion,
    Rubric,
    Submission,
)

NOW = datetime(2026, 3, 1, tzinfo=timezone.utc)
RUBRIC = make_rubric({"Depth": 60, "Clarity": 40})
SUBMISSION = Submission("s-1", "c-1", "stu-1", "the essay body", NOW)
INITIAL = InitialAssessment.build(
    RUBRIC, [CriterionScore("Depth", 3, "j"), CriterionScore("Clarity", 4, "j")]
)

RUBRIC_CONTEXT = ContextBundle(
    course_material="reading packet", assignment_prompt="write an essay"
)
SCORING_CONTEXT = ContextBundle(
    course_material="reading packet",
    assignment_prompt="write an essay",
    rubric=RUBRIC,
    submission=SUBMISSION,
)

VALID_RUBRIC_JSON = json.dumps(rubric_doc({"Depth": 60, "Clarity": 40}))
VALID_SCORES_JSON = json.dumps(
    {
        "scores": [
            {"criterion_name": "Depth", "score": 3, "justification": "solid"},
            {"criterion_name": "Clarity", "score": 4, "justification": "clean"},
        ]
    }
)


def rubric_script(*responses: str) -> MockProvider:
    return MockProvider({Task.RUBRIC_GENERATION.value: list(responses)})


# -- JSON extraction ------------------------------------------------------------


def test_extract_json_plain_object():
    assert extract_json('{"a": 1}') == {"a": 1}


def test_extract_json_tolerates_surrounding_prose():
    raw = 'Sure! Here is the rubric:\n{"a": {"b": 2}}\nHope that helps.'
    assert extract_json(raw) == {"a": {"b": 2}}


def test_extract_json_rejects_no_object():
    with pytest.raises(ValidationError):
        extract_json("no json here")
    with pytest.raises(ValidationError):
        extract_json("{broken")


# -- prompt rendering --------------------------------------------------------------


def test_templates_exist_and_carry_task_markers():
    for task in Task:
        text = template_text(task)
        assert f"{TASK_MARKER_PREFIX}{task.value}" in text
        assert task_from_prompt(text) is task


def test_render_prompt_is_deterministic_and_embeds_context():
    first = render_prompt(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    second = render_prompt(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    assert first == second
    assert "reading packet" in first
    assert "write an essay" in first


def test_render_prompt_includes_syllabus_only_when_present():
    with_syllabus = ContextBundle(
        course_material="reading packet",
        assignment_prompt="write an essay",
        syllabus="week 3: causes",
    )
    assert "week 3: causes" in render_prompt(Task.RUBRIC_GENERATION, with_syllabus)
    assert "week 3" not in render_prompt(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)


def test_render_prompt_embeds_rubric_and_submission_for_scoring():
    prompt = render_prompt(Task.AUTO_SCORING, SCORING_CONTEXT)
    assert "the essay body" in prompt
    assert '"criterion_name":"Depth"' in prompt


def test_render_prompt_requires_task_context():
    with pytest.raises(MissingContextError) as e:
        render_prompt(Task.AUTO_SCORING, RUBRIC_CONTEXT)
    assert set(e.value.missing) == {"rubric", "submission"}
    with pytest.raises(MissingContextError):
        render_prompt(
            Task.RUBRIC_GENERATION,
            ContextBundle(course_material="", assignment_prompt="write"),
        )


def test_repair_prompt_carries_errors_and_previous_reply():
    errors = [{"code": "weight_sum", "message": "weights must sum to 100"}]
    prompt = repair_prompt("BASE", errors, "previous junk")
    assert prompt.startswith("BASE")
    assert "weight_sum" in prompt
    assert "previous junk" in prompt


def test_task_from_prompt_handles_unknown_and_absent_markers():
    assert task_from_prompt("task: not_a_task\nrest") is None
    assert task_from_prompt("no marker at all") is None


def test_qa_pairs_block_orders_by_question():
    from veridesk.gateway.prompts import format_qa_pairs
    from veridesk.model.types import FollowUpQuestion, FollowUpResponse, QuestionKind

    q1 = FollowUpQuestion("q1", QuestionKind.EVALUATIVE, "why?", target_criterion="Depth")
    q2 = FollowUpQuestion("q2", QuestionKind.AUTHENTICITY, "walk me through it")
    block = format_qa_pairs(
        ((q1, FollowUpResponse("q1", "because", NOW)), (q2, FollowUpResponse("q2", "gladly", NOW)))
    )
    assert block.index("[q1]") < block.index("[q2]")
    assert "targets Depth" in block
    assert "A: because" in block


# -- context assembly from a case ----------------------------------------------------


def test_context_from_case_requires_course_material_for_rubrics():
    from support import drive_pilot, make_service
    from veridesk.model.types import AssignmentContext

    service = make_service()
    case = service.create_case(
        "a-1", AssignmentContext(assignment_prompt="write", course_material="")
    )
    with pytest.raises(MissingContextError) as e:
        context_from_case(Task.RUBRIC_GENERATION, service.get_case(case.case_id))
    assert "course_material" in e.value.missing


def test_context_from_case_assembles_qa_pairs_in_question_order():
    from support import drive_pilot, make_service

    service = make_service()
    case_id = drive_pilot(service, to="responses_received")
    case = service.get_case(case_id)
    bundle = context_from_case(Task.REASSESSMENT, case)
    assert [q.question_id for q, _ in bundle.qa_pairs] == list(case.questions.question_ids)
    assert all(q.question_id == r.question_id for q, r in bundle.qa_pairs)


# -- mock provider ----------------------------------------------------------------


def test_mock_provider_routes_by_task_marker():
    provider = MockProvider(
        {
            Task.RUBRIC_GENERATION.value: ["rubric reply"],
            Task.AUTO_SCORING.value: ["scores reply"],
        }
    )
    scoring_prompt = render_prompt(Task.AUTO_SCORING, SCORING_CONTEXT)
    rubric_prompt = render_prompt(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    assert provider.complete(scoring_prompt, {}) == "scores reply"
    assert provider.complete(rubric_prompt, {}) == "rubric reply"
    assert provider.calls == [Task.AUTO_SCORING.value, Task.RUBRIC_GENERATION.value]


def test_mock_provider_fails_cleanly_when_script_runs_dry():
    provider = rubric_script()
    prompt = render_prompt(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    with pytest.raises(ProviderError):
        provider.complete(prompt, {})
    with pytest.raises(ProviderError):
        provider.complete("prompt without a marker", {})


# -- the repair loop -----------------------------------------------------------------


@pytest.mark.parametrize("junk_attempts", [0, 1, 2])
def test_repair_loop_uses_exactly_junk_plus_one_attempts(junk_attempts):
    responses = ["not json"] * junk_attempts + [VALID_RUBRIC_JSON]
    gateway = Gateway(rubric_script(*responses), GatewayConfig(max_attempts=3))
    outcome = gateway.generate(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT, assignment_id="a-1")
    assert outcome.attempts_used == junk_attempts + 1
    assert len(outcome.transcripts) == junk_attempts + 1
    assert isinstance(outcome.artifact, Rubric)
    for transcript in outcome.transcripts[:-1]:
        assert transcript.errors
    assert outcome.transcripts[-1].errors == ()


def test_exhaustion_after_max_attempts():
    gateway = Gateway(
        rubric_script("junk", "junk", "junk"), GatewayConfig(max_attempts=3)
    )
    with pytest.raises(SchemaFailureExhaustedError) as e:
        gateway.generate(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    assert e.value.attempts == 3
    assert len(e.value.transcripts) == 3
    assert e.value.details()["attempts"] == 3


def test_single_attempt_config_never_repairs():
    provider = rubric_script("junk", VALID_RUBRIC_JSON)
    gateway = Gateway(provider, GatewayConfig(max_attempts=1))
    with pytest.raises(SchemaFailureExhaustedError):
        gateway.generate(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    assert provider.calls == [Task.RUBRIC_GENERATION.value]  # the valid reply was never requested


def test_repair_reprompt_includes_violations_and_offending_output():
    bad = json.dumps(rubric_doc({"Depth": 30, "Clarity": 30}))  # weights sum to 60
    gateway = Gateway(rubric_script(bad, VALID_RUBRIC_JSON), GatewayConfig(max_attempts=2))
    outcome = gateway.generate(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    assert outcome.attempts_used == 2
    second_prompt = outcome.transcripts[1].prompt
    assert "weight_sum" in second_prompt
    assert "got 60" in second_prompt
    assert bad in second_prompt
    assert outcome.transcripts[0].errors[0]["code"] == "weight_sum"


@pytest.mark.parametrize(
    "bad_response",
    [
        "utter prose, no JSON",
        '{"criteria": "not a list"}',
        json.dumps(rubric_doc({"Depth": 50, "Clarity": 30})),  # sums to 80
        json.dumps({"criteria": [{"criterion_name": "Depth", "weight": 100, "description": "d", "levels": []}]}),
    ],
)
def test_no_invalid_artifact_escapes(bad_response):
    gateway = Gateway(rubric_script(bad_response), GatewayConfig(max_attempts=1))
    with pytest.raises(SchemaFailureExhaustedError):
        gateway.generate(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)


def test_scoring_validation_uses_rubric_from_context():
    misaligned = json.dumps(
        {"scores": [{"criterion_name": "Style", "score": 3, "justification": "j"}]}
    )
    provider = MockProvider({Task.AUTO_SCORING.value: [misaligned, VALID_SCORES_JSON]})
    gateway = Gateway(provider, GatewayConfig(max_attempts=2))
    outcome = gateway.generate(Task.AUTO_SCORING, SCORING_CONTEXT)
    assert outcome.attempts_used == 2
    assert isinstance(outcome.artifact, InitialAssessment)
    assert outcome.artifact.weighted_total_tenths == 2 * (60 * 3 + 40 * 4)


def test_transcripts_record_provider_and_template_identity():
    gateway = Gateway(rubric_script(VALID_RUBRIC_JSON), GatewayConfig(max_attempts=3))
    outcome = gateway.generate(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)
    transcript = outcome.transcripts[0].to_dict()
    assert transcript["provider"] == "mock"
    assert transcript["model"] == "scripted-1"
    assert transcript["template_version"] == "v1"
    assert transcript["params"] == {"temperature": 0.0, "top_p": 1.0}
    assert "attempt" in transcript and "prompt" in transcript and "response" in transcript
    assert "occurred_at" not in transcript and "timestamp" not in transcript


def test_provider_errors_propagate_untouched():
    gateway = Gateway(rubric_script(), GatewayConfig(max_attempts=3))
    with pytest.raises(ProviderError):
        gateway.generate(Task.RUBRIC_GENERATION, RUBRIC_CONTEXT)


def test_module_level_generate_wrapper():
    outcome = generate(
        Task.RUBRIC_GENERATION,
        RUBRIC_CONTEXT,
        rubric_script(VALID_RUBRIC_JSON),
        assignment_id="a-1",
    )
    assert outcome.artifact.assignment_id == "a-1"


def test_config_bounds():
    with pytest.raises(ValueError):
        GatewayConfig(max_attempts=0)
    with pytest.raises(ValueError):
        GatewayConfig(concurrency=0)


# -- the reassessment guard ------------------------------------------------------------


def _candidate(total: int) -> Reassessment:
    return Reassessment(
        entries=(
            ReassessedCriterion("Depth", 3, 4, 1, "better"),
            ReassessedCriterion("Clarity", 4, 4, 0, "held"),
        ),
        final_weighted_total_tenths=total,
        final_feedback="good work",
        provenance=Provenance.GENERATED,
    )


def test_reassess_guard_returns_honest_candidate_unchanged():
    honest = _candidate(2 * (60 * 4 + 40 * 4))
    assert reassess_guard(INITIAL, honest, RUBRIC) is honest


def test_reassess_guard_overwrites_lying_total():
    lying = _candidate(990)
    fixed = reassess_guard(INITIAL, lying, RUBRIC)
    assert fixed.final_weighted_total_tenths == 2 * (60 * 4 + 40 * 4)
    assert fixed.entries == lying.entries
    assert fixed.final_feedback == lying.final_feedback


def test_reassess_guard_rejects_initial_score_mismatch():
    wrong_echo = Reassessment(
        entries=(
            ReassessedCriterion("Depth", 2, 4, 2, "r"),
            ReassessedCriterion("Clarity", 4, 4, 0, "r"),
        ),
        final_weighted_total_tenths=800,
        final_feedback="f",
    )
    with pytest.raises(ValidationError):
        reassess_guard(INITIAL, wrong_echo, RUBRIC)
