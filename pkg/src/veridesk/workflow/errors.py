"""Errors raised while applying events to a case."""

from __future__ import annotations

from ..errors import VerideskError
from .states import CaseState, EventKind


class TransitionError(VerideskError):
    """Base for every way an event can fail to apply."""

    code = "transition_error"


class IllegalTransitionError(TransitionError):
    code = "illegal_transition"

    def __init__(self, state: CaseState, kind: EventKind):
        super().__init__(f"event {kind.value} is not legal in state {state.value}")
        self.state = state
        self.kind = kind

    def details(self) -> dict:
        return {"state": self.state.value, "kind": self.kind.value}


class SequenceGapError(TransitionError):
    code = "sequence_gap"

    def __init__(self, expected: int, actual: int):
        super().__init__(f"expected event sequence {expected}, got {actual}")
        self.expected = expected
        self.actual = actual

    def details(self) -> dict:
        return {"expected": self.expected, "actual": self.actual}


class PayloadMismatchError(TransitionError):
    """The event's payload does not fit its kind or the case's artifacts."""

    code = "payload_mismatch"

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason

    def details(self) -> dict:
        return {"reason": self.reason}


class DuplicateResponseError(TransitionError):
    code = "duplicate_response"

    def __init__(self, question_id: str):
        super().__init__(f"question {question_id!r} already has a recorded response")
        self.question_id = question_id

    def details(self) -> dict:
        return {"question_id": self.question_id}
