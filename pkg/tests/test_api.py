"""HTTP facade: auth, idempotency, async generation, role gating, error table."""

from __future__ import annotations

import importlib
import itertools
import pkgutil
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from support import (
    PILOT_FINAL_TENTHS,
    PILOT_INITIAL_TENTHS,
    drive_pilot,
    load_pilot_script,
    make_service,
    pilot_materials,
    pilot_responses,
    pilot_submission_body,
)
from veridesk.api.app import create_app
from veridesk.api.auth import parse_token_table
from veridesk.api.errors import STATUS_FOR_CODE
from veridesk.errors import VerideskError
from veridesk.service.operations import OperationRegistry
from veridesk.settings import Settings
from veridesk.store.bundle import bundle_bytes, export_bundle

INSTRUCTOR = "tok-instructor"
STUDENT = "tok-student"
OTHER_STUDENT = "tok-other"
SERVICE_BOT = "tok-bot"

TOKEN_TABLE = ",".join(
    (
        f"{INSTRUCTOR}:instructor:prof-rivera",
        f"{STUDENT}:student:stu-001",
        f"{OTHER_STUDENT}:student:stu-999",
        f"{SERVICE_BOT}:service:bot-1",
    )
)

_key_counter = itertools.count(1)


def hdr(token: str) -> dict:
    """Auth plus a fresh idempotency key for each request."""
    return {
        "Authorization": f"Bearer {token}",
        "Idempotency-Key": f"key-{next(_key_counter):05d}",
    }


def make_client(script=None, *, max_attempts: int = 3):
    service = make_service(script, max_attempts=max_attempts)
    app = create_app(
        Settings(),
        service=service,
        registry=OperationRegistry(mode="inline"),
        tokens=parse_token_table(TOKEN_TABLE),
    )
    return TestClient(app, raise_server_exceptions=False), service


def create_case_request_body() -> dict:
    materials = pilot_materials()
    body = {
        "assignment_id": "hist-201-essay-2",
        "assignment_prompt": materials.assignment_prompt,
        "course_material": materials.course_material,
    }
    if materials.syllabus is not None:
        body["syllabus"] = materials.syllabus
    return body


def settle(client: TestClient, operation_id: str) -> dict:
    response = client.get(f"/api/v1/operations/{operation_id}", headers=hdr(INSTRUCTOR))
    assert response.status_code == 200, response.text
    doc = response.json()
    assert doc["status"] in ("succeeded", "failed")
    return doc


# -- authentication ---------------------------------------------------------------


def test_requests_without_credentials_are_unauthorized():
    client, _ = make_client()
    for headers in (
        {},
        {"Authorization": "Token abc"},
        {"Authorization": "Bearer"},
        {"Authorization": "Bearer nope"},
    ):
        response = client.get("/api/v1/cases/case-0001", headers=headers)
        assert response.status_code == 401
        assert response.json()["code"] == "unauthorized"


def test_students_cannot_reach_review_routes():
    client, service = make_client()
    case_id = drive_pilot(service, to="rubric_drafted")
    attempts = (
        ("post", "/api/v1/cases", {"json": create_case_request_body()}),
        ("post", f"/api/v1/cases/{case_id}/rubric:generate", {}),
        ("post", f"/api/v1/cases/{case_id}/rubric:approve", {}),
        ("get", f"/api/v1/cases/{case_id}/export", {}),
        ("get", "/api/v1/operations/op-0001", {}),
        ("post", f"/api/v1/cases/{case_id}/stage2:skip", {}),
    )
    for method, url, kwargs in attempts:
        response = getattr(client, method)(url, headers=hdr(STUDENT), **kwargs)
        assert response.status_code == 403, (url, response.text)
        assert response.json()["code"] == "forbidden"


def test_students_see_only_their_own_case():
    client, service = make_client()
    case_id = drive_pilot(service, to="awaiting_responses")

    own = client.get(f"/api/v1/cases/{case_id}", headers=hdr(STUDENT))
    assert own.status_code == 200
    assert own.json()["view"] == "student"

    other = client.get(f"/api/v1/cases/{case_id}", headers=hdr(OTHER_STUDENT))
    assert other.status_code == 403

    fresh = make_client()[0]
    # no submission yet: nothing ties the student to the case
    fresh_service = fresh.app.state.service
    bare = drive_pilot(fresh_service, to="created")
    assert fresh.get(f"/api/v1/cases/{bare}", headers=hdr(STUDENT)).status_code == 403


def test_service_role_counts_as_reviewer():
    client, service = make_client()
    case_id = drive_pilot(service, to="finalized")
    response = client.get(f"/api/v1/cases/{case_id}", headers=hdr(SERVICE_BOT))
    assert response.status_code == 200
    assert response.json()["state"] == "Finalized"
    assert "allowed_actions" in response.json()


# -- idempotency ------------------------------------------------------------------


def test_posts_require_an_idempotency_key():
    client, _ = make_client()
    response = client.post(
        "/api/v1/cases",
        headers={"Authorization": f"Bearer {INSTRUCTOR}"},
        json=create_case_request_body(),
    )
    assert response.status_code == 400
    assert response.json()["code"] == "idempotency_key_required"


def test_replayed_key_returns_cached_body_without_reexecuting():
    client, service = make_client()
    headers = hdr(INSTRUCTOR)
    first = client.post("/api/v1/cases", headers=headers, json=create_case_request_body())
    assert first.status_code == 201
    case_id = first.json()["case_id"]

    replay = client.post("/api/v1/cases", headers=headers, json=create_case_request_body())
    assert replay.status_code == 201
    assert replay.json() == first.json()
    assert replay.headers["Idempotency-Replayed"] == "true"
    assert service.store.list_cases() == [case_id]

    fresh = client.post(
        "/api/v1/cases", headers=hdr(INSTRUCTOR), json=create_case_request_body()
    )
    assert fresh.status_code == 201
    assert fresh.json()["case_id"] != case_id


def test_error_responses_are_never_cached():
    client, _ = make_client()
    headers = hdr(INSTRUCTOR)
    for _ in range(2):
        response = client.post(
            "/api/v1/cases/case-9999/rubric:generate", headers=headers
        )
        assert response.status_code == 404
        assert "Idempotency-Replayed" not in response.headers


# -- the pipeline over pure HTTP ----------------------------------------------------


def test_full_pipeline_over_http():
    client, service = make_client()

    created = client.post(
        "/api/v1/cases", headers=hdr(INSTRUCTOR), json=create_case_request_body()
    )
    assert created.status_code == 201
    case_id = created.json()["case_id"]

    accepted = client.post(
        f"/api/v1/cases/{case_id}/rubric:generate", headers=hdr(INSTRUCTOR)
    )
    assert accepted.status_code == 202
    operation = settle(client, accepted.json()["operation_id"])
    assert operation["status"] == "succeeded"
    assert operation["result"]["attempts_used"] == 1
    assert operation["result"]["case"]["state"] == "RubricDrafted"

    approved = client.post(
        f"/api/v1/cases/{case_id}/rubric:approve", headers=hdr(INSTRUCTOR)
    )
    assert approved.status_code == 200
    assert approved.json()["state"] == "RubricApproved"

    uploaded = client.post(
        f"/api/v1/cases/{case_id}/submission",
        headers=hdr(INSTRUCTOR),
        json={"author_ref": "stu-001", "body": pilot_submission_body()},
    )
    assert uploaded.status_code == 200
    assert uploaded.json()["state"] == "SubmissionReceived"

    accepted = client.post(
        f"/api/v1/cases/{case_id}/scores:generate", headers=hdr(INSTRUCTOR)
    )
    assert accepted.status_code == 202
    settle(client, accepted.json()["operation_id"])
    scored = client.post(
        f"/api/v1/cases/{case_id}/scores:approve", headers=hdr(INSTRUCTOR)
    )
    assert scored.status_code == 200
    assert scored.json()["initial"]["weighted_total_tenths"] == PILOT_INITIAL_TENTHS

    accepted = client.post(
        f"/api/v1/cases/{case_id}/questions:generate", headers=hdr(INSTRUCTOR)
    )
    assert accepted.status_code == 202
    settle(client, accepted.json()["operation_id"])
    assert (
        client.post(
            f"/api/v1/cases/{case_id}/questions:approve", headers=hdr(INSTRUCTOR)
        ).status_code
        == 200
    )
    sent = client.post(
        f"/api/v1/cases/{case_id}/questions:send", headers=hdr(INSTRUCTOR)
    )
    assert sent.status_code == 200
    assert sent.json()["state"] == "AwaitingResponses"

    student_before = client.get(f"/api/v1/cases/{case_id}", headers=hdr(STUDENT))
    assert student_before.status_code == 200
    assert student_before.json()["status"] == "awaiting_your_responses"
    assert "CaseState" not in student_before.text
    assert "target_criterion" not in student_before.text

    for question_id, body in pilot_responses().items():
        answered = client.post(
            f"/api/v1/cases/{case_id}/responses",
            headers=hdr(STUDENT),
            json={"question_id": question_id, "body": body},
        )
        assert answered.status_code == 200
        assert answered.json()["view"] == "student"

    accepted = client.post(
        f"/api/v1/cases/{case_id}/reassessment:generate", headers=hdr(INSTRUCTOR)
    )
    assert accepted.status_code == 202
    settle(client, accepted.json()["operation_id"])
    final = client.post(
        f"/api/v1/cases/{case_id}/reassessment:approve", headers=hdr(INSTRUCTOR)
    )
    assert final.status_code == 200
    view = final.json()
    assert view["state"] == "Finalized"
    assert view["terminal"] is True
    assert view["final_weighted_total_tenths"] == PILOT_FINAL_TENTHS
    assert view["final_weighted_total_display"] == "81.0"

    student_after = client.get(f"/api/v1/cases/{case_id}", headers=hdr(STUDENT))
    assert student_after.json()["status"] == "complete"
    assert student_after.json()["final"]["weighted_total_tenths"] == PILOT_FINAL_TENTHS

    exported = client.get(f"/api/v1/cases/{case_id}/export", headers=hdr(INSTRUCTOR))
    assert exported.status_code == 200
    expected = bundle_bytes(export_bundle(service.store, case_id))
    assert exported.content == expected
    again = client.get(f"/api/v1/cases/{case_id}/export", headers=hdr(INSTRUCTOR))
    assert again.content == exported.content


def test_skip_route_over_http():
    client, service = make_client()
    case_id = drive_pilot(service, to="scores_approved")
    skipped = client.post(
        f"/api/v1/cases/{case_id}/stage2:skip", headers=hdr(INSTRUCTOR)
    )
    assert skipped.status_code == 200
    assert skipped.json()["state"] == "Stage2Skipped"
    assert skipped.json()["final_weighted_total_tenths"] == PILOT_INITIAL_TENTHS


# -- approvals with edits over HTTP ---------------------------------------------------


def test_approve_with_weight_edits_changes_the_outcome():
    client, service = make_client()
    case_id = drive_pilot(service, to="rubric_drafted")
    response = client.post(
        f"/api/v1/cases/{case_id}/rubric:approve",
        headers=hdr(INSTRUCTOR),
        json={
            "edits": [
                {"op": "replace", "path": "criteria[0].weight", "old": 25, "new": 30},
                {"op": "replace", "path": "criteria[1].weight", "old": 20, "new": 15},
            ]
        },
    )
    assert response.status_code == 200
    assert response.json()["rubric"]["provenance"] == "instructor_edited"
    weights = [c["weight"] for c in response.json()["rubric"]["criteria"]]
    assert weights == [30, 15, 15, 25, 15]

    service.upload_submission(case_id, "stu-001", pilot_submission_body())
    service.generate_scores(case_id)
    service.approve_scores(case_id, "instructor")
    service.generate_questions(case_id)
    service.approve_questions(case_id, "instructor")
    service.send_questions(case_id)
    for question_id, body in pilot_responses().items():
        service.record_response(case_id, question_id, body)
    service.generate_reassessment(case_id)
    case = service.approve_reassessment(case_id, "instructor")

    # shifting 5 weight from a criterion that stayed at 3 onto one that rose
    # to 4 leaves the initial total alone and lifts the final one
    assert case.initial.weighted_total_tenths == PILOT_INITIAL_TENTHS
    assert case.reassessment.final_weighted_total_tenths == 820


def test_protected_field_edit_is_rejected():
    client, service = make_client()
    case_id = drive_pilot(service, to="rubric_drafted")
    response = client.post(
        f"/api/v1/cases/{case_id}/rubric:approve",
        headers=hdr(INSTRUCTOR),
        json={
            "edits": [
                {
                    "op": "replace",
                    "path": "provenance",
                    "old": "generated",
                    "new": "instructor_edited",
                }
            ]
        },
    )
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "validation_failed"
    assert any(v["code"] == "protected_field" for v in body["details"]["violations"])
    assert service.get_case(case_id).state.value == "RubricDrafted"


# -- generation failure handling ------------------------------------------------------


def test_illegal_generation_is_rejected_before_any_work():
    client, service = make_client()
    case_id = drive_pilot(service, to="created")
    response = client.post(
        f"/api/v1/cases/{case_id}/scores:generate", headers=hdr(INSTRUCTOR)
    )
    assert response.status_code == 409
    assert response.json()["code"] == "illegal_transition"
    assert service.gateway.provider.calls == []
    missing = client.get("/api/v1/operations/op-0001", headers=hdr(INSTRUCTOR))
    assert missing.status_code == 404


def test_exhausted_generation_settles_as_failed_operation():
    script = load_pilot_script()
    script["rubric_generation"] = ["junk", "junk", "junk"]
    client, service = make_client(script)
    case_id = drive_pilot(service, to="created")
    accepted = client.post(
        f"/api/v1/cases/{case_id}/rubric:generate", headers=hdr(INSTRUCTOR)
    )
    assert accepted.status_code == 202
    operation = settle(client, accepted.json()["operation_id"])
    assert operation["status"] == "failed"
    assert operation["error"]["code"] == "generation_exhausted"
    assert "result" not in operation
    view = client.get(f"/api/v1/cases/{case_id}", headers=hdr(INSTRUCTOR))
    assert view.json()["state"] == "Created"


# -- error envelopes ------------------------------------------------------------------


def test_unknown_resources_are_404_envelopes():
    client, _ = make_client()
    for url in ("/api/v1/cases/case-9999", "/api/v1/operations/op-9999"):
        response = client.get(url, headers=hdr(INSTRUCTOR))
        assert response.status_code == 404
        body = response.json()
        assert set(body) == {"code", "message", "details"}
        assert body["code"] == "not_found"


def test_malformed_request_bodies_are_422():
    client, _ = make_client()
    empty = client.post("/api/v1/cases", headers=hdr(INSTRUCTOR), json={})
    assert empty.status_code == 422
    assert empty.json()["code"] == "request_invalid"
    assert empty.json()["details"]["errors"]

    extra = client.post(
        "/api/v1/cases",
        headers=hdr(INSTRUCTOR),
        json={**create_case_request_body(), "surprise": 1},
    )
    assert extra.status_code == 422
    assert extra.json()["code"] == "request_invalid"


def test_duplicate_and_unknown_responses_map_to_conflict_and_invalid():
    client, service = make_client()
    case_id = drive_pilot(service, to="awaiting_responses")
    ok = client.post(
        f"/api/v1/cases/{case_id}/responses",
        headers=hdr(STUDENT),
        json={"question_id": "q1", "body": "first answer"},
    )
    assert ok.status_code == 200

    duplicate = client.post(
        f"/api/v1/cases/{case_id}/responses",
        headers=hdr(STUDENT),
        json={"question_id": "q1", "body": "second answer"},
    )
    assert duplicate.status_code == 409
    assert duplicate.json()["code"] == "duplicate_response"

    unknown = client.post(
        f"/api/v1/cases/{case_id}/responses",
        headers=hdr(STUDENT),
        json={"question_id": "q9", "body": "answer"},
    )
    assert unknown.status_code == 422
    assert unknown.json()["code"] == "payload_mismatch"


# -- the error table and the facade boundary ------------------------------------------


def _all_domain_error_classes() -> set[type]:
    import veridesk

    for module in pkgutil.walk_packages(veridesk.__path__, prefix="veridesk."):
        importlib.import_module(module.name)
    found: set[type] = set()
    stack: list[type] = [VerideskError]
    while stack:
        cls = stack.pop()
        for sub in cls.__subclasses__():
            if sub not in found:
                found.add(sub)
                stack.append(sub)
    return found


def test_every_domain_error_code_has_exactly_one_status():
    classes = _all_domain_error_classes()
    assert len(classes) >= 15
    for cls in classes:
        assert cls.code in STATUS_FOR_CODE, f"{cls.__name__} code {cls.code!r} unmapped"
    assert STATUS_FOR_CODE["unauthorized"] == 401
    assert STATUS_FOR_CODE["forbidden"] == 403
    assert STATUS_FOR_CODE["not_found"] == 404
    assert STATUS_FOR_CODE["illegal_transition"] == 409
    assert STATUS_FOR_CODE["validation_failed"] == 422
    assert STATUS_FOR_CODE["generation_exhausted"] == 502
    assert STATUS_FOR_CODE["provider_timeout"] == 504
    assert set(STATUS_FOR_CODE.values()) <= {400, 401, 403, 404, 409, 422, 500, 502, 504}


def test_http_layer_never_touches_workflow_state_machinery():
    api_dir = Path(__file__).resolve().parents[1] / "src" / "veridesk" / "api"
    sources = sorted(api_dir.glob("*.py"))
    assert sources
    for path in sources:
        text = path.read_text(encoding="utf-8")
        assert "CaseState" not in text, f"{path.name} reaches into workflow states"
        assert "replay(" not in text, f"{path.name} replays event logs directly"
