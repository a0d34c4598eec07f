/**
 * Wire types for the /api/v1 surface.
 *
 * Every interface here mirrors a JSON payload the server actually emits;
 * field names must stay byte-for-byte identical to the server keys. The
 * UI never invents fields of its own on these shapes.
 */

export const SCHEMA_VERSION = "1";

export const SCORE_MIN = 1;
export const SCORE_MAX = 5;
export const LEVEL_ORDINALS = [1, 2, 3, 4, 5] as const;
export const MAX_QUESTIONS = 3;

export type QuestionKind = "evaluative" | "authenticity";
export const QUESTION_KINDS: readonly QuestionKind[] = ["evaluative", "authenticity"];

export type Provenance = "generated" | "instructor_edited";

export type ApprovalStage = "rubric" | "initial_scores" | "questions" | "reassessment";

/** Workflow states, exactly as the server names them in view payloads. */
export type CaseStateName =
  | "Created"
  | "RubricDrafted"
  | "RubricApproved"
  | "SubmissionReceived"
  | "ScoresDrafted"
  | "ScoresApproved"
  | "QuestionsDrafted"
  | "QuestionsApproved"
  | "AwaitingResponses"
  | "ResponsesReceived"
  | "ReassessmentDrafted"
  | "Finalized"
  | "Stage2Skipped";

export interface PerformanceLevelDoc {
  level: number;
  desc: string;
}

export interface CriterionDoc {
  criterion_name: string;
  weight: number;
  description: string;
  levels: PerformanceLevelDoc[];
}

export interface RubricDoc {
  schema_version: string;
  rubric_id: string;
  assignment_id: string;
  provenance: Provenance;
  version: number;
  criteria: CriterionDoc[];
}

export interface CriterionScoreDoc {
  criterion_name: string;
  score: number;
  justification: string;
}

export interface InitialAssessmentDoc {
  schema_version: string;
  provenance: Provenance;
  scores: CriterionScoreDoc[];
  weighted_total_tenths: number;
}

export interface QuestionDoc {
  question_id: string;
  kind: QuestionKind;
  text: string;
  target_criterion: string | null;
}

export interface QuestionSetDoc {
  schema_version: string;
  provenance: Provenance;
  questions: QuestionDoc[];
}

export interface ReassessedCriterionDoc {
  criterion_name: string;
  initial_score: number;
  final_score: number;
  delta: number;
  rationale: string;
}

export interface ReassessmentDoc {
  schema_version: string;
  provenance: Provenance;
  entries: ReassessedCriterionDoc[];
  final_weighted_total_tenths: number;
  final_feedback: string;
}

export interface SubmissionDoc {
  schema_version: string;
  submission_id: string;
  case_id: string;
  author_ref: string;
  body: string;
  received_at: string;
}

export interface ResponseDoc {
  schema_version: string;
  question_id: string;
  body: string;
  received_at: string;
}

export interface ApprovalDoc {
  stage: ApprovalStage;
  actor_ref: string;
  decided_at: string;
  edits: EditEntry[];
}

export interface MaterialsDoc {
  assignment_prompt: string;
  course_material: string;
  syllabus: string | null;
  reveal_initial_scores: boolean;
}

/** GET /cases/{id} with a reviewer token. */
export interface InstructorCaseView {
  schema_version: string;
  case_id: string;
  assignment_id: string;
  state: CaseStateName;
  version: number;
  terminal: boolean;
  materials: MaterialsDoc;
  rubric: RubricDoc | null;
  submission: SubmissionDoc | null;
  initial: InitialAssessmentDoc | null;
  questions: QuestionSetDoc | null;
  questions_sent: boolean;
  responses: ResponseDoc[];
  reassessment: ReassessmentDoc | null;
  approvals: ApprovalDoc[];
  allowed_actions: string[];
  final_weighted_total_tenths: number | null;
  final_weighted_total_display: string | null;
}

/** GET /cases/{id} with the submission author's token. */
export interface StudentCaseView {
  view: "student";
  case_id: string;
  assignment_id: string;
  status: "in_progress" | "awaiting_your_responses" | "complete";
  questions: Array<{ question_id: string; kind: QuestionKind; text: string }>;
  responses: Array<{ question_id: string; body: string; received_at: string }>;
  initial_scores: {
    scores: CriterionScoreDoc[];
    weighted_total_tenths: number;
    weighted_total_display: string;
  } | null;
  final: {
    scores: Array<{ criterion_name: string; final_score: number }>;
    feedback: string | null;
    weighted_total_tenths: number;
    weighted_total_display: string;
  } | null;
}

/** GET /operations/{id}. */
export interface OperationDoc {
  operation_id: string;
  case_id: string;
  task: string;
  status: "running" | "succeeded" | "failed";
  result?: Record<string, unknown>;
  error?: ErrorEnvelope;
}

/** One event row inside an exported audit bundle. */
export interface EventDoc {
  schema_version: string;
  event_id: string;
  case_id: string;
  sequence: number;
  kind: string;
  actor_ref: string;
  occurred_at: string;
  payload: Record<string, unknown>;
  content_hash: string;
}

/** GET /cases/{id}/export. */
export interface AuditBundle {
  schema_version: string;
  kind: string;
  case_id: string;
  events: EventDoc[];
  transcripts: Array<Record<string, unknown>>;
  case: Record<string, unknown>;
  case_hash: string;
  bundle_hash: string;
}

/** Non-2xx body shape shared by every endpoint. */
export interface ErrorEnvelope {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

/**
 * One field-path edit, the unit the approve endpoints accept. Paths read
 * like `criteria[0].weight`; replace/remove carry the expected old value
 * so stale edits fail server-side instead of clobbering newer drafts.
 */
export interface EditEntry {
  op: "replace" | "add" | "remove";
  path: string;
  old?: unknown;
  new?: unknown;
}
