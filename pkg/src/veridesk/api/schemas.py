"""Request and response bodies for the HTTP API."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class CreateCaseRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    assignment_id: str = Field(min_length=1)
    assignment_prompt: str = Field(min_length=1)
    course_material: str = ""
    syllabus: str | None = None
    reveal_initial_scores: bool = False


class CreateCaseResponse(BaseModel):
    case_id: str


class OperationAccepted(BaseModel):
    operation_id: str


class EditEntry(BaseModel):
    """One field-path edit applied during approval."""

    model_config = ConfigDict(extra="forbid")

    op: str
    path: str
    old: Any = None
    new: Any = None


class ApproveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    edits: list[EditEntry] = Field(default_factory=list)


class SubmissionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    author_ref: str = Field(min_length=1)
    body: str = Field(min_length=1)


class ResponseRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    question_id: str = Field(min_length=1)
    body: str = Field(min_length=1)


class ErrorEnvelope(BaseModel):
    code: str
    message: str
    details: dict = Field(default_factory=dict)
