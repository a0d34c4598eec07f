"""Domain-error to HTTP mapping.

Every domain error code maps to exactly one HTTP status; the response body
is always the envelope ``{code, message, details}``.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..errors import VerideskError, envelope

# One status per machine-readable code. Codes that can only arise from
# internal invariant breaches (sequence_gap) map to 500 on purpose: seeing
# one over HTTP means the server, not the client, is wrong.
STATUS_FOR_CODE: dict[str, int] = {
    # auth
    "unauthorized": 401,
    "forbidden": 403,
    # lookups
    "not_found": 404,
    # malformed or rejected inputs
    "request_invalid": 422,
    "validation_failed": 422,
    "kind_mismatch": 422,
    "missing_context": 422,
    "payload_mismatch": 422,
    "bundle_integrity": 422,
    # state conflicts
    "transition_error": 409,
    "illegal_transition": 409,
    "version_conflict": 409,
    "duplicate_response": 409,
    # idempotency contract
    "idempotency_key_required": 400,
    # upstream provider trouble
    "generation_error": 502,
    "provider_error": 502,
    "generation_exhausted": 502,
    "provider_timeout": 504,
    # server faults
    "sequence_gap": 500,
    "storage_error": 500,
    "internal_error": 500,
}

FALLBACK_STATUS = 500


def status_for(code: str) -> int:
    return STATUS_FOR_CODE.get(code, FALLBACK_STATUS)


def error_response(exc: BaseException) -> JSONResponse:
    body = envelope(exc)
    return JSONResponse(status_code=status_for(body["code"]), content=body)


def install_handlers(app: FastAPI) -> None:
    @app.exception_handler(VerideskError)
    async def handle_domain_error(request: Request, exc: VerideskError):
        return error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def handle_request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "request_invalid",
                "message": "request body failed validation",
                "details": {"errors": jsonable_encoder(exc.errors())},
            },
        )
