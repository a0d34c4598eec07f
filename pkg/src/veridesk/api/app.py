"""HTTP facade over the case service.

Every state change flows through the workflow engine via CaseService;
handlers translate HTTP to service calls and back, nothing more. The
normative surface lives under ``/api/v1``:

* ``POST /cases`` — create a case (201)
* ``POST /cases/{id}/rubric:generate`` and the scores / questions /
  reassessment variants — start generation, return 202 with an
  operation id to poll
* ``POST /cases/{id}/<stage>:approve`` — approve with optional edits (200)
* ``POST /cases/{id}/submission``, ``…/questions:send``,
  ``…/responses``, ``…/stage2:skip`` — workflow actions (200)
* ``GET /cases/{id}`` — role-dependent view
* ``GET /cases/{id}/export`` — audit bundle (canonical bytes)
* ``GET /operations/{id}`` — poll a generation job

All POST routes require an ``Idempotency-Key`` header; retrying a key
replays the original 2xx response without touching the store again.
"""

from __future__ import annotations

from functools import partial
from typing import Annotated

from fastapi import APIRouter, Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse

from ..model.types import ApprovalStage, AssignmentContext
from ..service.operations import OperationRegistry
from ..service.views import instructor_view, student_view
from ..settings import (
    Settings,
    build_registry,
    build_service,
    load_settings,
)
from ..store.bundle import bundle_bytes, export_bundle
from ..workflow.states import EventKind
from .auth import (
    REVIEW_ROLES,
    ForbiddenError,
    TokenInfo,
    authenticate,
    parse_token_table,
    require_reviewer,
)
from .errors import install_handlers
from .schemas import (
    ApproveRequest,
    CreateCaseRequest,
    CreateCaseResponse,
    OperationAccepted,
    ResponseRequest,
    SubmissionRequest,
)

API_PREFIX = "/api/v1"

IDEMPOTENCY_HEADER = "Idempotency-Key"


def _service(request: Request):
    return request.app.state.service


def current_actor(request: Request) -> TokenInfo:
    return authenticate(
        request.headers.get("Authorization"), request.app.state.tokens
    )


def current_reviewer(request: Request) -> TokenInfo:
    return require_reviewer(current_actor(request))


Actor = Annotated[TokenInfo, Depends(current_actor)]
Reviewer = Annotated[TokenInfo, Depends(current_reviewer)]

router = APIRouter(prefix=API_PREFIX)


# -- case lifecycle ----------------------------------------------------------


@router.post("/cases", status_code=201, response_model=CreateCaseResponse)
def create_case(body: CreateCaseRequest, request: Request, actor: Reviewer):
    materials = AssignmentContext(
        assignment_prompt=body.assignment_prompt,
        course_material=body.course_material,
        syllabus=body.syllabus,
        reveal_initial_scores=body.reveal_initial_scores,
    )
    case = _service(request).create_case(
        body.assignment_id, materials, actor_ref=actor.actor_ref
    )
    return {"case_id": case.case_id}


@router.get("/cases/{case_id}")
def get_case(case_id: str, request: Request, actor: Actor):
    case = _service(request).get_case(case_id)
    if actor.role in REVIEW_ROLES:
        return instructor_view(case)
    if case.submission is None or case.submission.author_ref != actor.actor_ref:
        raise ForbiddenError("this case does not belong to you")
    return student_view(case, actor.actor_ref)


@router.get("/cases/{case_id}/export")
def export_case(case_id: str, request: Request, actor: Reviewer):
    bundle = export_bundle(_service(request).store, case_id)
    return Response(content=bundle_bytes(bundle), media_type="application/json")


# -- asynchronous generation -------------------------------------------------


def _run_generation(service, method_name: str, case_id: str) -> dict:
    # Generation events are recorded as the system acting: the human mark
    # on the artifact is the approval that follows, not the trigger click.
    case, outcome = getattr(service, method_name)(case_id)
    return {"case": instructor_view(case), "attempts_used": outcome.attempts_used}


def _accept_generation(
    request: Request,
    case_id: str,
    kind: EventKind,
    method_name: str,
    task_name: str,
) -> dict:
    """Shared 202 path: reject doomed requests now, then hand the real work
    to the operation registry."""
    service = _service(request)
    registry: OperationRegistry = request.app.state.registry
    service.precheck(case_id, kind)
    operation_id = service.ids.next_id("op")
    registry.start(
        operation_id,
        case_id,
        task_name,
        partial(_run_generation, service, method_name, case_id),
    )
    return {"operation_id": operation_id}


@router.post(
    "/cases/{case_id}/rubric:generate",
    status_code=202,
    response_model=OperationAccepted,
)
def generate_rubric(case_id: str, request: Request, actor: Reviewer):
    return _accept_generation(
        request, case_id,
        EventKind.RUBRIC_GENERATED, "generate_rubric", "rubric_generation",
    )


@router.post(
    "/cases/{case_id}/scores:generate",
    status_code=202,
    response_model=OperationAccepted,
)
def generate_scores(case_id: str, request: Request, actor: Reviewer):
    return _accept_generation(
        request, case_id,
        EventKind.SCORES_GENERATED, "generate_scores", "auto_scoring",
    )


@router.post(
    "/cases/{case_id}/questions:generate",
    status_code=202,
    response_model=OperationAccepted,
)
def generate_questions(case_id: str, request: Request, actor: Reviewer):
    return _accept_generation(
        request, case_id,
        EventKind.QUESTIONS_GENERATED, "generate_questions", "question_drafting",
    )


@router.post(
    "/cases/{case_id}/reassessment:generate",
    status_code=202,
    response_model=OperationAccepted,
)
def generate_reassessment(case_id: str, request: Request, actor: Reviewer):
    return _accept_generation(
        request, case_id,
        EventKind.REASSESSMENT_GENERATED, "generate_reassessment", "reassessment",
    )


@router.get("/operations/{operation_id}")
def get_operation(operation_id: str, request: Request, actor: Reviewer):
    return request.app.state.registry.get(operation_id).to_dict()


# -- approvals ---------------------------------------------------------------


def _approve(
    request: Request,
    case_id: str,
    actor: TokenInfo,
    stage: ApprovalStage,
    body: ApproveRequest,
) -> dict:
    service = _service(request)
    edits = service.approval_edits([entry.model_dump() for entry in body.edits])
    method = {
        ApprovalStage.RUBRIC: service.approve_rubric,
        ApprovalStage.INITIAL_SCORES: service.approve_scores,
        ApprovalStage.QUESTIONS: service.approve_questions,
        ApprovalStage.REASSESSMENT: service.approve_reassessment,
    }[stage]
    case = method(case_id, actor.actor_ref, edits)
    return instructor_view(case)


@router.post("/cases/{case_id}/rubric:approve")
def approve_rubric(
    case_id: str, request: Request, actor: Reviewer, body: ApproveRequest | None = None
):
    return _approve(request, case_id, actor, ApprovalStage.RUBRIC, body or ApproveRequest())


@router.post("/cases/{case_id}/scores:approve")
def approve_scores(
    case_id: str, request: Request, actor: Reviewer, body: ApproveRequest | None = None
):
    return _approve(
        request, case_id, actor, ApprovalStage.INITIAL_SCORES, body or ApproveRequest()
    )


@router.post("/cases/{case_id}/questions:approve")
def approve_questions(
    case_id: str, request: Request, actor: Reviewer, body: ApproveRequest | None = None
):
    return _approve(
        request, case_id, actor, ApprovalStage.QUESTIONS, body or ApproveRequest()
    )


@router.post("/cases/{case_id}/reassessment:approve")
def approve_reassessment(
    case_id: str, request: Request, actor: Reviewer, body: ApproveRequest | None = None
):
    return _approve(
        request, case_id, actor, ApprovalStage.REASSESSMENT, body or ApproveRequest()
    )


# -- submission, question delivery, responses, skip --------------------------


@router.post("/cases/{case_id}/submission")
def upload_submission(
    case_id: str, body: SubmissionRequest, request: Request, actor: Reviewer
):
    case = _service(request).upload_submission(
        case_id, body.author_ref, body.body, actor_ref=actor.actor_ref
    )
    return instructor_view(case)


@router.post("/cases/{case_id}/questions:send")
def send_questions(case_id: str, request: Request, actor: Reviewer):
    case = _service(request).send_questions(case_id, actor_ref=actor.actor_ref)
    return instructor_view(case)


@router.post("/cases/{case_id}/responses")
def record_response(
    case_id: str, body: ResponseRequest, request: Request, actor: Actor
):
    service = _service(request)
    case = service.get_case(case_id)
    if actor.role not in REVIEW_ROLES:
        if case.submission is None or case.submission.author_ref != actor.actor_ref:
            raise ForbiddenError("this case does not belong to you")
    updated = service.record_response(case_id, body.question_id, body.body)
    if actor.role in REVIEW_ROLES:
        return instructor_view(updated)
    return student_view(updated, actor.actor_ref)


@router.post("/cases/{case_id}/stage2:skip")
def skip_stage2(case_id: str, request: Request, actor: Reviewer):
    case = _service(request).skip_stage2(case_id, actor_ref=actor.actor_ref)
    return instructor_view(case)


# -- app assembly ------------------------------------------------------------


def create_app(
    settings: Settings | None = None,
    *,
    service=None,
    registry: OperationRegistry | None = None,
    tokens: dict[str, TokenInfo] | None = None,
) -> FastAPI:
    settings = settings or load_settings()
    app = FastAPI(title="veridesk", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.settings = settings
    app.state.service = service if service is not None else build_service(settings)
    app.state.registry = registry if registry is not None else build_registry(settings)
    app.state.tokens = tokens if tokens is not None else parse_token_table(settings.tokens)
    install_handlers(app)

    @app.middleware("http")
    async def idempotency(request: Request, call_next):
        if request.method != "POST":
            return await call_next(request)
        key = request.headers.get(IDEMPOTENCY_HEADER)
        if not key:
            return JSONResponse(
                status_code=400,
                content={
                    "code": "idempotency_key_required",
                    "message": f"POST requests require an {IDEMPOTENCY_HEADER} header",
                    "details": {},
                },
            )
        store = request.app.state.service.store
        route = f"{request.method} {request.url.path}"
        cached = store.idempotent_response(key, route)
        if cached is not None:
            status, body = cached
            return Response(
                content=body,
                status_code=status,
                media_type="application/json",
                headers={"Idempotency-Replayed": "true"},
            )
        response = await call_next(request)
        if 200 <= response.status_code < 300:
            chunks = [chunk async for chunk in response.body_iterator]
            body_bytes = b"".join(chunks)
            store.remember_response(
                key, route, response.status_code, body_bytes.decode("utf-8")
            )
            return Response(
                content=body_bytes,
                status_code=response.status_code,
                headers=dict(response.headers),
                media_type=response.media_type,
            )
        return response

    app.include_router(router)
    return app
