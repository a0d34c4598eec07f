"""Case orchestration: one method per workflow action.

CaseService wires the store, the gateway, and the runtime sources
together. It holds no state of its own and contains no transition rules:
it asks the workflow engine what is allowed, builds events, and lets the
store's compare-and-append decide who wins a race. Each method reads the
clock exactly once so that equivalent call sequences produce identical
timestamps under a fixed clock.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from ..gateway.context import Task, context_from_case
from ..gateway.generate import Gateway, GatewayConfig, GenerationOutcome
from ..gateway.providers import Provider
from ..model.diff import DiffEntry, entries_from_payload
from ..model.types import (
    ApprovalStage,
    AssignmentContext,
    FollowUpResponse,
    Submission,
)
from ..runtime import Clock, IdSource, RandomIdSource, SystemClock
from ..store.bundle import export_bundle
from ..store.store import EventStore
from ..workflow import engine
from ..workflow.errors import IllegalTransitionError, PayloadMismatchError
from ..workflow.events import AssessmentCase
from ..workflow.states import EventKind, allowed_actions

GENERATION_TASKS: dict[EventKind, Task] = {
    EventKind.RUBRIC_GENERATED: Task.RUBRIC_GENERATION,
    EventKind.SCORES_GENERATED: Task.AUTO_SCORING,
    EventKind.QUESTIONS_GENERATED: Task.QUESTION_DRAFTING,
    EventKind.REASSESSMENT_GENERATED: Task.REASSESSMENT,
}


class CaseService:
    def __init__(
        self,
        store: EventStore,
        provider: Provider,
        gateway_config: GatewayConfig | None = None,
        clock: Clock | None = None,
        ids: IdSource | None = None,
    ):
        self.store = store
        self.gateway = Gateway(provider, gateway_config or GatewayConfig())
        self.clock = clock or SystemClock()
        self.ids = ids or RandomIdSource()

    # -- lifecycle ---------------------------------------------------------

    def create_case(
        self,
        assignment_id: str,
        materials: AssignmentContext,
        actor_ref: str = "instructor",
    ) -> AssessmentCase:
        occurred_at = self.clock.now()
        case_id = self.ids.next_id("case")
        event = engine.make_created_event(
            event_id=self.ids.event_id(case_id, 1),
            case_id=case_id,
            assignment_id=assignment_id,
            materials=materials,
            occurred_at=occurred_at,
            actor_ref=actor_ref,
        )
        self.store.append_event(event.case_id, 0, event)
        return self.store.load_case(event.case_id)

    def get_case(self, case_id: str) -> AssessmentCase:
        return self.store.load_case(case_id)

    def export_case(self, case_id: str) -> dict:
        return export_bundle(self.store, case_id)

    # -- generation stages ---------------------------------------------------

    def generate_rubric(
        self, case_id: str, actor_ref: str = "system"
    ) -> tuple[AssessmentCase, GenerationOutcome]:
        return self._generate(case_id, EventKind.RUBRIC_GENERATED, actor_ref)

    def generate_scores(
        self, case_id: str, actor_ref: str = "system"
    ) -> tuple[AssessmentCase, GenerationOutcome]:
        return self._generate(case_id, EventKind.SCORES_GENERATED, actor_ref)

    def generate_questions(
        self, case_id: str, actor_ref: str = "system"
    ) -> tuple[AssessmentCase, GenerationOutcome]:
        return self._generate(case_id, EventKind.QUESTIONS_GENERATED, actor_ref)

    def generate_reassessment(
        self, case_id: str, actor_ref: str = "system"
    ) -> tuple[AssessmentCase, GenerationOutcome]:
        return self._generate(case_id, EventKind.REASSESSMENT_GENERATED, actor_ref)

    def _generate(
        self, case_id: str, kind: EventKind, actor_ref: str
    ) -> tuple[AssessmentCase, GenerationOutcome]:
        """Shared generation path: precheck, call provider, append, persist
        transcripts. The precheck runs before any provider call so illegal
        requests cost nothing upstream."""
        occurred_at = self.clock.now()
        case = self.store.load_case(case_id)
        self._precheck(case, kind)
        task = GENERATION_TASKS[kind]
        context = context_from_case(task, case)

        rubric_id = None
        rubric_version = 1
        if kind is EventKind.RUBRIC_GENERATED:
            if case.rubric is not None:
                rubric_id = case.rubric.rubric_id
                rubric_version = case.rubric.version + 1
            else:
                rubric_id = self.ids.scoped_id(case_id, "rubric")

        outcome = self.gateway.generate(
            task,
            context,
            rubric_id=rubric_id,
            assignment_id=case.assignment_id,
            rubric_version=rubric_version,
        )
        event = engine.make_generated_event(
            case,
            kind,
            outcome.artifact,
            event_id=self.ids.event_id(case_id, case.version + 1),
            occurred_at=occurred_at,
            actor_ref=actor_ref,
        )
        self.store.append_event(case_id, case.version, event)
        self.store.save_transcripts(
            case_id,
            event.sequence,
            event.event_id,
            task.value,
            [t.to_dict() for t in outcome.transcripts],
        )
        return self.store.load_case(case_id), outcome

    # -- approvals -----------------------------------------------------------

    def approve_rubric(
        self, case_id: str, actor_ref: str, edits: Sequence[DiffEntry] = ()
    ) -> AssessmentCase:
        return self._approve(case_id, ApprovalStage.RUBRIC, actor_ref, edits)

    def approve_scores(
        self, case_id: str, actor_ref: str, edits: Sequence[DiffEntry] = ()
    ) -> AssessmentCase:
        return self._approve(case_id, ApprovalStage.INITIAL_SCORES, actor_ref, edits)

    def approve_questions(
        self, case_id: str, actor_ref: str, edits: Sequence[DiffEntry] = ()
    ) -> AssessmentCase:
        return self._approve(case_id, ApprovalStage.QUESTIONS, actor_ref, edits)

    def approve_reassessment(
        self, case_id: str, actor_ref: str, edits: Sequence[DiffEntry] = ()
    ) -> AssessmentCase:
        return self._approve(case_id, ApprovalStage.REASSESSMENT, actor_ref, edits)

    def _approve(
        self,
        case_id: str,
        stage: ApprovalStage,
        actor_ref: str,
        edits: Sequence[DiffEntry],
    ) -> AssessmentCase:
        occurred_at = self.clock.now()
        case = self.store.load_case(case_id)
        event = engine.record_approval(
            case,
            stage,
            actor_ref,
            tuple(edits),
            event_id=self.ids.event_id(case_id, case.version + 1),
            occurred_at=occurred_at,
        )
        self.store.append_event(case_id, case.version, event)
        return self.store.load_case(case_id)

    # -- submission, questions out, responses, skip ---------------------------

    def upload_submission(
        self, case_id: str, author_ref: str, body: str, actor_ref: str = "instructor"
    ) -> AssessmentCase:
        occurred_at = self.clock.now()
        case = self.store.load_case(case_id)
        self._precheck(case, EventKind.SUBMISSION_UPLOADED)
        submission = Submission(
            submission_id=self.ids.scoped_id(case_id, "sub"),
            case_id=case_id,
            author_ref=author_ref,
            body=body,
            received_at=occurred_at,
        )
        event = engine.make_submission_event(
            case,
            submission,
            event_id=self.ids.event_id(case_id, case.version + 1),
            occurred_at=occurred_at,
            actor_ref=actor_ref,
        )
        self.store.append_event(case_id, case.version, event)
        return self.store.load_case(case_id)

    def send_questions(self, case_id: str, actor_ref: str = "instructor") -> AssessmentCase:
        occurred_at = self.clock.now()
        case = self.store.load_case(case_id)
        self._precheck(case, EventKind.QUESTIONS_SENT)
        event = engine.make_questions_sent_event(
            case,
            event_id=self.ids.event_id(case_id, case.version + 1),
            occurred_at=occurred_at,
            actor_ref=actor_ref,
        )
        self.store.append_event(case_id, case.version, event)
        return self.store.load_case(case_id)

    def record_response(self, case_id: str, question_id: str, body: str) -> AssessmentCase:
        """Record a student's answer. The acting party is always the
        submission's author: responses are the student's own words no
        matter which client relays them."""
        occurred_at = self.clock.now()
        case = self.store.load_case(case_id)
        self._precheck(case, EventKind.RESPONSE_RECORDED)
        if case.submission is None:
            raise PayloadMismatchError("case has no submission to respond for")
        response = FollowUpResponse(
            question_id=question_id, body=body, received_at=occurred_at
        )
        event = engine.make_response_event(
            case,
            response,
            event_id=self.ids.event_id(case_id, case.version + 1),
            occurred_at=occurred_at,
            actor_ref=case.submission.author_ref,
        )
        self.store.append_event(case_id, case.version, event)
        return self.store.load_case(case_id)

    def skip_stage2(self, case_id: str, actor_ref: str = "instructor") -> AssessmentCase:
        occurred_at = self.clock.now()
        case = self.store.load_case(case_id)
        self._precheck(case, EventKind.STAGE2_SKIP_REQUESTED)
        event = engine.make_skip_event(
            case,
            event_id=self.ids.event_id(case_id, case.version + 1),
            occurred_at=occurred_at,
            actor_ref=actor_ref,
        )
        self.store.append_event(case_id, case.version, event)
        return self.store.load_case(case_id)

    # -- helpers --------------------------------------------------------------

    @staticmethod
    def _precheck(case: AssessmentCase, kind: EventKind) -> None:
        if kind not in allowed_actions(case.state):
            raise IllegalTransitionError(case.state, kind)

    def precheck(self, case_id: str, kind: EventKind) -> AssessmentCase:
        """Load a case and confirm the action is currently legal.

        Lets callers that defer the real work (the async generation
        endpoints) reject doomed requests up front with the same errors
        the deferred run would raise."""
        case = self.store.load_case(case_id)
        self._precheck(case, kind)
        return case

    def approval_edits(self, raw_edits: Sequence[Mapping] | None) -> tuple[DiffEntry, ...]:
        """Parse a client-supplied edits array (None means no edits)."""
        if not raw_edits:
            return ()
        return entries_from_payload(list(raw_edits))
