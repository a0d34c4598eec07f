"""Workflow engine: exhaustive transition legality, payload re-verification,
approval-gate semantics, and replay as a pure fold."""

from __future__ import annotations

from dataclasses import replace
from datetime import datetime, timezone

import pytest

from support import drive_pilot, load_pilot_script, make_service
from veridesk.model.diff import DiffEntry
from veridesk.model.errors import ProtectedFieldError, StaleEditError, ValidationError
from veridesk.model.types import ApprovalStage, Provenance
from veridesk.workflow import engine
from veridesk.workflow.errors import (
    DuplicateResponseError,
    IllegalTransitionError,
    PayloadMismatchError,
    SequenceGapError,
    TransitionError,
)
from veridesk.workflow.events import CaseEvent
from veridesk.workflow.states import (
    STATE_ORDER,
    TERMINAL_STATES,
    TRANSITIONS,
    CaseState,
    EventKind,
    allowed_actions,
)

NOW = datetime(2026, 3, 1, tzinfo=timezone.utc)

ALL_PAIRS = [(s, k) for s in CaseState for k in EventKind]
ILLEGAL_PAIRS = [pair for pair in ALL_PAIRS if pair not in TRANSITIONS]
STATE_NAMES = {
    CaseState.CREATED: "created",
    CaseState.RUBRIC_DRAFTED: "rubric_drafted",
    CaseState.RUBRIC_APPROVED: "rubric_approved",
    CaseState.SUBMISSION_RECEIVED: "submission_received",
    CaseState.SCORES_DRAFTED: "scores_drafted",
    CaseState.SCORES_APPROVED: "scores_approved",
    CaseState.QUESTIONS_DRAFTED: "questions_drafted",
    CaseState.QUESTIONS_APPROVED: "questions_approved",
    CaseState.AWAITING_RESPONSES: "awaiting_responses",
    CaseState.RESPONSES_RECEIVED: "responses_received",
    CaseState.REASSESSMENT_DRAFTED: "reassessment_drafted",
    CaseState.FINALIZED: "finalized",
    CaseState.STAGE2_SKIPPED: "stage2_skipped",
}

_case_cache: dict[CaseState, object] = {}


def case_in(state: CaseState):
    """A real case driven to ``state`` through the service (cached)."""
    if state not in _case_cache:
        service = make_service()
        case_id = drive_pilot(service, to=STATE_NAMES[state])
        _case_cache[state] = service.get_case(case_id)
    case = _case_cache[state]
    assert case.state is state
    return case


def dummy_event(case, kind: EventKind) -> CaseEvent:
    return CaseEvent(
        event_id="probe-1",
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=kind,
        payload={},
        occurred_at=NOW,
        actor_ref="probe",
    )


# -- exhaustive legality matrix -------------------------------------------------


def test_matrix_covers_every_state_kind_pair():
    assert len(ALL_PAIRS) == len(CaseState) * len(EventKind) == 13 * 13
    assert len(TRANSITIONS) == 16
    assert len(ILLEGAL_PAIRS) == 169 - 16


@pytest.mark.parametrize(
    ("state", "kind"), ILLEGAL_PAIRS, ids=[f"{s.value}-{k.value}" for s, k in ILLEGAL_PAIRS]
)
def test_illegal_pair_is_refused_before_payload_inspection(state, kind):
    case = case_in(state)
    with pytest.raises(IllegalTransitionError) as e:
        engine.apply(case, dummy_event(case, kind))
    assert e.value.details() == {"state": state.value, "kind": kind.value}


@pytest.mark.parametrize(
    ("state", "kind"),
    sorted(TRANSITIONS, key=lambda p: (p[0].value, p[1].value)),
    ids=[f"{s.value}-{k.value}" for s, k in sorted(TRANSITIONS, key=lambda p: (p[0].value, p[1].value))],
)
def test_legal_pair_is_never_refused_as_illegal(state, kind):
    # A dummy payload must fail on its content, not on the transition.
    case = case_in(state)
    try:
        engine.apply(case, dummy_event(case, kind))
    except IllegalTransitionError as exc:  # pragma: no cover - the defect under test
        pytest.fail(f"legal pair refused: {exc}")
    except TransitionError:
        pass


def test_terminal_states_allow_nothing():
    for state in TERMINAL_STATES:
        assert allowed_actions(state) == frozenset()


def test_allowed_actions_mirror_the_transition_table():
    for state in CaseState:
        assert allowed_actions(state) == {k for (s, k) in TRANSITIONS if s is state}


def test_progress_ordinal_never_decreases_along_transitions():
    for (state, _), nxt in TRANSITIONS.items():
        assert STATE_ORDER[nxt] >= STATE_ORDER[state]


# -- positive coverage of every legal pair ---------------------------------------


def test_full_pipeline_walks_the_expected_states():
    service = make_service()
    case_id = drive_pilot(service, to="created")
    expected = [
        (service.generate_rubric, CaseState.RUBRIC_DRAFTED),
    ]
    for step, want in expected:
        step(case_id)
    assert service.get_case(case_id).state is CaseState.RUBRIC_DRAFTED

    service.approve_rubric(case_id, "instructor")
    assert service.get_case(case_id).state is CaseState.RUBRIC_APPROVED
    service.upload_submission(case_id, "stu-001", "an essay body")
    assert service.get_case(case_id).state is CaseState.SUBMISSION_RECEIVED
    service.generate_scores(case_id)
    assert service.get_case(case_id).state is CaseState.SCORES_DRAFTED
    service.approve_scores(case_id, "instructor")
    assert service.get_case(case_id).state is CaseState.SCORES_APPROVED
    service.generate_questions(case_id)
    assert service.get_case(case_id).state is CaseState.QUESTIONS_DRAFTED
    service.approve_questions(case_id, "instructor")
    assert service.get_case(case_id).state is CaseState.QUESTIONS_APPROVED
    service.send_questions(case_id)
    assert service.get_case(case_id).state is CaseState.AWAITING_RESPONSES

    case = service.get_case(case_id)
    first, second = case.questions.question_ids
    service.record_response(case_id, first, "answer one")
    assert service.get_case(case_id).state is CaseState.AWAITING_RESPONSES
    service.record_response(case_id, second, "answer two")
    assert service.get_case(case_id).state is CaseState.RESPONSES_RECEIVED

    service.generate_reassessment(case_id)
    assert service.get_case(case_id).state is CaseState.REASSESSMENT_DRAFTED
    service.approve_reassessment(case_id, "instructor")
    final = service.get_case(case_id)
    assert final.state is CaseState.FINALIZED
    assert final.terminal


def test_skip_route_reaches_the_other_terminal():
    service = make_service()
    case_id = drive_pilot(service, to="stage2_skipped")
    case = service.get_case(case_id)
    assert case.state is CaseState.STAGE2_SKIPPED
    assert case.terminal
    assert case.final_weighted_total_tenths() == case.initial.weighted_total_tenths


@pytest.mark.parametrize(
    ("stage_name", "regen", "kind"),
    [
        ("rubric_drafted", "generate_rubric", EventKind.RUBRIC_GENERATED),
        ("scores_drafted", "generate_scores", EventKind.SCORES_GENERATED),
        ("questions_drafted", "generate_questions", EventKind.QUESTIONS_GENERATED),
        ("reassessment_drafted", "generate_reassessment", EventKind.REASSESSMENT_GENERATED),
    ],
)
def test_regeneration_self_loops_keep_state_and_bump_version(stage_name, regen, kind):
    script = {task: entries * 2 for task, entries in load_pilot_script().items()}
    service = make_service(script)
    case_id = drive_pilot(service, to=stage_name)
    before = service.get_case(case_id)
    getattr(service, regen)(case_id)
    after = service.get_case(case_id)
    assert after.state is before.state
    assert after.version == before.version + 1


def test_rubric_regeneration_increments_rubric_version():
    script = {task: entries * 2 for task, entries in load_pilot_script().items()}
    service = make_service(script)
    case_id = drive_pilot(service, to="rubric_drafted")
    assert service.get_case(case_id).rubric.version == 1
    service.generate_rubric(case_id)
    assert service.get_case(case_id).rubric.version == 2


# -- sequence and identity checks -------------------------------------------------


def test_sequence_gap_refused():
    case = case_in(CaseState.CREATED)
    event = dummy_event(case, EventKind.RUBRIC_GENERATED)
    for bad in (case.version, case.version + 2, 99):
        wrong = replace(event, sequence=bad)
        with pytest.raises(SequenceGapError) as e:
            engine.apply(case, wrong)
        assert e.value.details() == {"expected": case.version + 1, "actual": bad}


def test_event_for_another_case_refused():
    case = case_in(CaseState.CREATED)
    event = replace(dummy_event(case, EventKind.RUBRIC_GENERATED), case_id="case-9999")
    with pytest.raises(PayloadMismatchError):
        engine.apply(case, event)


def test_case_created_never_applies_mid_stream():
    for state in CaseState:
        case = case_in(state)
        with pytest.raises(IllegalTransitionError):
            engine.apply(case, dummy_event(case, EventKind.CASE_CREATED))


def test_initial_case_requires_created_event_at_sequence_one():
    case = case_in(CaseState.CREATED)
    good = engine.make_created_event(
        event_id="e1",
        case_id="c-1",
        assignment_id="a-1",
        materials=case.materials,
        occurred_at=NOW,
        actor_ref="instructor",
    )
    built = engine.initial_case(good)
    assert built.state is CaseState.CREATED
    assert built.version == 1

    with pytest.raises(SequenceGapError):
        engine.initial_case(replace(good, sequence=2))
    not_created = dummy_event(case, EventKind.RUBRIC_GENERATED)
    with pytest.raises(PayloadMismatchError):
        engine.initial_case(not_created)
    with pytest.raises(PayloadMismatchError):
        engine.initial_case(replace(good, payload={"assignment_id": "a-1"}))


def test_replay_is_a_fold_of_apply():
    service = make_service()
    case_id = drive_pilot(service)
    events = service.store.load_events(case_id)
    folded = engine.initial_case(events[0])
    for event in events[1:]:
        folded = engine.apply(folded, event)
    assert engine.replay(events) == folded
    assert folded == service.get_case(case_id)


def test_replay_rejects_empty_and_tags_offending_sequence():
    with pytest.raises(PayloadMismatchError):
        engine.replay([])
    service = make_service()
    case_id = drive_pilot(service)
    events = service.store.load_events(case_id)
    shuffled = [events[0], events[2], events[1], *events[3:]]
    with pytest.raises(TransitionError) as e:
        engine.replay(shuffled)
    assert e.value.offending_sequence == shuffled[1].sequence


def test_apply_is_pure():
    case = case_in(CaseState.RESPONSES_RECEIVED)
    snapshot = case.to_dict()
    events = []
    service = make_service()
    case_id = drive_pilot(service, to="reassessment_drafted")
    # Re-applying the same stored event twice gives identical results...
    events = service.store.load_events(case_id)
    base = engine.replay(events[:-1])
    once = engine.apply(base, events[-1])
    twice = engine.apply(base, events[-1])
    assert once == twice
    # ...and the inputs are untouched.
    assert case.to_dict() == snapshot


# -- generated payloads are re-verified, not trusted -------------------------------


def _generated_event(case, kind, key, document, sequence=None):
    return CaseEvent(
        event_id="probe-2",
        case_id=case.case_id,
        sequence=sequence or case.version + 1,
        kind=kind,
        payload={key: document},
        occurred_at=NOW,
        actor_ref="system",
    )


def test_rubric_for_another_assignment_refused():
    case = case_in(CaseState.CREATED)
    rubric = case_in(CaseState.RUBRIC_DRAFTED).rubric
    doc = replace(rubric, assignment_id="someone-elses").to_dict()
    with pytest.raises(PayloadMismatchError):
        engine.apply(case, _generated_event(case, EventKind.RUBRIC_GENERATED, "rubric", doc))


def test_first_rubric_must_be_version_one_and_regen_version_two():
    case = case_in(CaseState.CREATED)
    rubric = case_in(CaseState.RUBRIC_DRAFTED).rubric
    v2 = replace(rubric, version=2).to_dict()
    with pytest.raises(PayloadMismatchError):
        engine.apply(case, _generated_event(case, EventKind.RUBRIC_GENERATED, "rubric", v2))

    drafted = case_in(CaseState.RUBRIC_DRAFTED)
    v1_again = drafted.rubric.to_dict()
    with pytest.raises(PayloadMismatchError):
        engine.apply(
            drafted, _generated_event(drafted, EventKind.RUBRIC_GENERATED, "rubric", v1_again)
        )


def test_generated_artifacts_must_carry_generated_provenance():
    case = case_in(CaseState.CREATED)
    rubric = case_in(CaseState.RUBRIC_DRAFTED).rubric
    doc = replace(rubric, provenance=Provenance.INSTRUCTOR_EDITED).to_dict()
    with pytest.raises(PayloadMismatchError) as e:
        engine.apply(case, _generated_event(case, EventKind.RUBRIC_GENERATED, "rubric", doc))
    assert "generated" in str(e.value)


def test_scores_with_lying_total_refused():
    case = case_in(CaseState.SUBMISSION_RECEIVED)
    honest = case_in(CaseState.SCORES_DRAFTED).initial
    lying = honest.to_dict()
    lying["weighted_total_tenths"] = 990
    with pytest.raises(PayloadMismatchError) as e:
        engine.apply(case, _generated_event(case, EventKind.SCORES_GENERATED, "assessment", lying))
    assert "!=" in str(e.value)


def test_questions_targeting_unknown_criterion_refused():
    case = case_in(CaseState.SCORES_APPROVED)
    questions = case_in(CaseState.QUESTIONS_DRAFTED).questions.to_dict()
    questions["questions"][0]["target_criterion"] = "Imaginary"
    with pytest.raises(PayloadMismatchError):
        engine.apply(
            case, _generated_event(case, EventKind.QUESTIONS_GENERATED, "questions", questions)
        )


def test_reassessment_that_misquotes_initial_scores_refused():
    case = case_in(CaseState.RESPONSES_RECEIVED)
    honest = case_in(CaseState.REASSESSMENT_DRAFTED).reassessment.to_dict()
    entry = honest["entries"][0]
    entry["initial_score"] = entry["initial_score"] - 1
    entry["delta"] = entry["final_score"] - entry["initial_score"]
    with pytest.raises(PayloadMismatchError):
        engine.apply(
            case,
            _generated_event(case, EventKind.REASSESSMENT_GENERATED, "reassessment", honest),
        )


def test_questions_sent_must_list_the_approved_ids():
    case = case_in(CaseState.QUESTIONS_APPROVED)
    event = CaseEvent(
        event_id="probe-3",
        case_id=case.case_id,
        sequence=case.version + 1,
        kind=EventKind.QUESTIONS_SENT,
        payload={"question_ids": ["q1"]},  # approved set has two
        occurred_at=NOW,
        actor_ref="instructor",
    )
    with pytest.raises(PayloadMismatchError):
        engine.apply(case, event)
    good = engine.make_questions_sent_event(
        case, event_id="probe-4", occurred_at=NOW, actor_ref="instructor"
    )
    assert engine.apply(case, good).state is CaseState.AWAITING_RESPONSES


def test_skip_event_must_carry_the_approved_total_unchanged():
    case = case_in(CaseState.SCORES_APPROVED)
    event = engine.make_skip_event(
        case, event_id="probe-5", occurred_at=NOW, actor_ref="instructor"
    )
    tampered = replace(event, payload={"final_weighted_total_tenths": 999})
    with pytest.raises(PayloadMismatchError):
        engine.apply(case, tampered)
    assert engine.apply(case, event).state is CaseState.STAGE2_SKIPPED


def test_duplicate_response_refused_and_unknown_question_refused():
    service = make_service()
    case_id = drive_pilot(service, to="awaiting_responses")
    case = service.get_case(case_id)
    q1 = case.questions.question_ids[0]
    service.record_response(case_id, q1, "first answer")
    with pytest.raises(DuplicateResponseError):
        service.record_response(case_id, q1, "second answer")
    with pytest.raises(TransitionError):
        service.record_response(case_id, "q-unknown", "answer")


# -- approval gates -----------------------------------------------------------------


def test_approval_requires_the_matching_draft_state():
    case = case_in(CaseState.CREATED)
    with pytest.raises(IllegalTransitionError):
        engine.record_approval(
            case, ApprovalStage.RUBRIC, "instructor", event_id="e", occurred_at=NOW
        )


def test_approval_with_edits_rewrites_artifact_and_flips_provenance():
    case = case_in(CaseState.RUBRIC_DRAFTED)
    doc = case.rubric.to_dict()
    edits = (
        DiffEntry(
            op="replace",
            path="criteria[0].weight",
            old=doc["criteria"][0]["weight"],
            new=doc["criteria"][0]["weight"] + 5,
        ),
        DiffEntry(
            op="replace",
            path="criteria[1].weight",
            old=doc["criteria"][1]["weight"],
            new=doc["criteria"][1]["weight"] - 5,
        ),
    )
    event = engine.record_approval(
        case, ApprovalStage.RUBRIC, "instructor", edits, event_id="e", occurred_at=NOW
    )
    after = engine.apply(case, event)
    assert after.rubric.provenance is Provenance.INSTRUCTOR_EDITED
    assert after.rubric.criteria[0].weight == doc["criteria"][0]["weight"] + 5
    assert after.approvals[-1].stage is ApprovalStage.RUBRIC
    assert after.approvals[-1].edits == edits


def test_approval_without_edits_keeps_generated_provenance():
    case = case_in(CaseState.RUBRIC_DRAFTED)
    event = engine.record_approval(
        case, ApprovalStage.RUBRIC, "instructor", event_id="e", occurred_at=NOW
    )
    after = engine.apply(case, event)
    assert after.rubric.provenance is Provenance.GENERATED
    assert after.approvals[-1].edits == ()


@pytest.mark.parametrize(
    "path",
    [
        "provenance",
        "schema_version",
        "rubric_id",
        "assignment_id",
        "version",
        "weighted_total_tenths",
    ],
)
def test_protected_fields_cannot_be_edited(path):
    stage = (
        ApprovalStage.INITIAL_SCORES if path == "weighted_total_tenths" else ApprovalStage.RUBRIC
    )
    state = (
        CaseState.SCORES_DRAFTED if path == "weighted_total_tenths" else CaseState.RUBRIC_DRAFTED
    )
    case = case_in(state)
    edit = DiffEntry(op="replace", path=path, old=None, new="x")
    with pytest.raises(ValidationError) as e:
        engine.record_approval(
            case, stage, "instructor", (edit,), event_id="e", occurred_at=NOW
        )
    assert e.value.has(ProtectedFieldError)


def test_stale_edit_refused_at_the_gate():
    case = case_in(CaseState.RUBRIC_DRAFTED)
    edit = DiffEntry(op="replace", path="criteria[0].weight", old=1, new=30)
    with pytest.raises(ValidationError) as e:
        engine.record_approval(
            case, ApprovalStage.RUBRIC, "instructor", (edit,), event_id="e", occurred_at=NOW
        )
    assert e.value.has(StaleEditError)


def test_edits_that_break_an_invariant_are_refused():
    case = case_in(CaseState.RUBRIC_DRAFTED)
    doc = case.rubric.to_dict()
    lopsided = DiffEntry(
        op="replace",
        path="criteria[0].weight",
        old=doc["criteria"][0]["weight"],
        new=doc["criteria"][0]["weight"] + 5,  # sum becomes 105
    )
    with pytest.raises(ValidationError) as e:
        engine.record_approval(
            case, ApprovalStage.RUBRIC, "instructor", (lopsided,), event_id="e", occurred_at=NOW
        )
    assert any(v.code == "weight_sum" for v in e.value.violations)


def test_apply_refuses_tampered_approval_payload():
    case = case_in(CaseState.RUBRIC_DRAFTED)
    event = engine.record_approval(
        case, ApprovalStage.RUBRIC, "instructor", event_id="e", occurred_at=NOW
    )
    payload = dict(event.payload)
    artifact = {k: v for k, v in payload["artifact"].items()}
    artifact["criteria"] = [dict(c) for c in artifact["criteria"]]
    artifact["criteria"][0]["weight"] += 5
    artifact["criteria"][1]["weight"] -= 5
    payload["artifact"] = artifact
    tampered = replace(event, payload=payload)
    with pytest.raises(PayloadMismatchError) as e:
        engine.apply(case, tampered)
    assert "does not equal the draft" in str(e.value)


def test_every_stage_approval_is_recorded_in_order():
    service = make_service()
    case_id = drive_pilot(service)
    case = service.get_case(case_id)
    assert [a.stage for a in case.approvals] == [
        ApprovalStage.RUBRIC,
        ApprovalStage.INITIAL_SCORES,
        ApprovalStage.QUESTIONS,
        ApprovalStage.REASSESSMENT,
    ]
    assert case.approved_stages == frozenset(ApprovalStage)
    assert case.approval_for(ApprovalStage.QUESTIONS).actor_ref == "instructor"


def test_skip_route_records_exactly_two_approvals():
    service = make_service()
    case_id = drive_pilot(service, to="stage2_skipped")
    case = service.get_case(case_id)
    assert case.approved_stages == frozenset(
        {ApprovalStage.RUBRIC, ApprovalStage.INITIAL_SCORES}
    )
