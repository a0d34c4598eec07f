/**
 * Typed client for the /api/v1 surface — the only way UI code talks to the
 * server. Every request is recorded in a network log so tests (and support
 * staff) can assert exactly what a view fetched.
 *
 * POSTs always carry a fresh Idempotency-Key; the server replays the
 * original response if a retry reuses one, so a double-clicked approve
 * button cannot double-apply.
 */

import {
  AuditBundle,
  EditEntry,
  ErrorEnvelope,
  InstructorCaseView,
  OperationDoc,
  StudentCaseView,
} from "./types.js";

export interface HttpRequest {
  method: "GET" | "POST";
  url: string;
  headers: Record<string, string>;
  body?: string;
}

export interface HttpResponse {
  status: number;
  bodyText: string;
}

export type HttpTransport = (request: HttpRequest) => Promise<HttpResponse>;

export type GenerateStage = "rubric" | "scores" | "questions" | "reassessment";
export type ApproveStage = GenerateStage;

/** A non-2xx reply, carrying the server's error envelope. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: Record<string, unknown>;

  constructor(status: number, envelope: ErrorEnvelope) {
    super(envelope.message);
    this.name = "ApiError";
    this.status = status;
    this.code = envelope.code;
    this.details = envelope.details ?? {};
  }
}

/** Transport backed by the browser's fetch. */
export function fetchTransport(fetchFn: typeof fetch = fetch): HttpTransport {
  return async (request) => {
    const response = await fetchFn(request.url, {
      method: request.method,
      headers: request.headers,
      body: request.body,
    });
    return { status: response.status, bodyText: await response.text() };
  };
}

function defaultKeyGenerator(): () => string {
  let counter = 0;
  return () => {
    counter += 1;
    const entropy =
      typeof crypto !== "undefined" && "randomUUID" in crypto
        ? crypto.randomUUID()
        : `${Date.now()}-${Math.random().toString(36).slice(2)}`;
    return `ui-${counter}-${entropy}`;
  };
}

export interface ApiClientOptions {
  baseUrl: string;
  token: string;
  transport: HttpTransport;
  /** Overridable for deterministic tests. */
  newIdempotencyKey?: () => string;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly token: string;
  private readonly transport: HttpTransport;
  private readonly newIdempotencyKey: () => string;

  /** Every request this client ever issued, in order. */
  readonly networkLog: HttpRequest[] = [];

  constructor(options: ApiClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, "");
    this.token = options.token;
    this.transport = options.transport;
    this.newIdempotencyKey = options.newIdempotencyKey ?? defaultKeyGenerator();
  }

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {
      Authorization: `Bearer ${this.token}`,
    };
    let bodyText: string | undefined;
    if (method === "POST") {
      headers["Idempotency-Key"] = this.newIdempotencyKey();
      headers["Content-Type"] = "application/json";
      bodyText = JSON.stringify(body ?? {});
    }
    const request: HttpRequest = {
      method,
      url: `${this.baseUrl}/api/v1${path}`,
      headers,
      body: bodyText,
    };
    this.networkLog.push(request);
    const response = await this.transport(request);
    const parsed = response.bodyText === "" ? null : JSON.parse(response.bodyText);
    if (response.status < 200 || response.status >= 300) {
      const envelope: ErrorEnvelope =
        parsed && typeof parsed.code === "string"
          ? parsed
          : { code: "unknown_error", message: response.bodyText, details: {} };
      throw new ApiError(response.status, envelope);
    }
    return parsed as T;
  }

  // -- reads ---------------------------------------------------------------

  /** GET /cases/{id} — instructor tokens get the full case view. */
  getCase(caseId: string): Promise<InstructorCaseView> {
    return this.request("GET", `/cases/${caseId}`);
  }

  /** GET /cases/{id} — student tokens get the gated student view. */
  getStudentCase(caseId: string): Promise<StudentCaseView> {
    return this.request("GET", `/cases/${caseId}`);
  }

  /** GET /cases/{id}/export — the audit bundle (events, transcripts, hashes). */
  getExport(caseId: string): Promise<AuditBundle> {
    return this.request("GET", `/cases/${caseId}/export`);
  }

  /** GET /operations/{id} — poll a 202-accepted generation job. */
  getOperation(operationId: string): Promise<OperationDoc> {
    return this.request("GET", `/operations/${operationId}`);
  }

  // -- writes --------------------------------------------------------------

  createCase(body: {
    assignment_id: string;
    assignment_prompt: string;
    course_material?: string;
    syllabus?: string | null;
    reveal_initial_scores?: boolean;
  }): Promise<{ case_id: string }> {
    return this.request("POST", "/cases", body);
  }

  /** POST /cases/{id}/{stage}:generate — returns a 202 operation handle. */
  generate(caseId: string, stage: GenerateStage): Promise<{ operation_id: string }> {
    return this.request("POST", `/cases/${caseId}/${stage}:generate`, {});
  }

  /** POST /cases/{id}/{stage}:approve with the accumulated edits. */
  approve(
    caseId: string,
    stage: ApproveStage,
    edits: EditEntry[],
  ): Promise<InstructorCaseView> {
    return this.request("POST", `/cases/${caseId}/${stage}:approve`, { edits });
  }

  submitWork(caseId: string, body: { author_ref: string; body: string }): Promise<InstructorCaseView> {
    return this.request("POST", `/cases/${caseId}/submission`, body);
  }

  sendQuestions(caseId: string): Promise<InstructorCaseView> {
    return this.request("POST", `/cases/${caseId}/questions:send`, {});
  }

  submitResponse(
    caseId: string,
    body: { question_id: string; body: string },
  ): Promise<StudentCaseView> {
    return this.request("POST", `/cases/${caseId}/responses`, body);
  }

  skipStageTwo(caseId: string): Promise<InstructorCaseView> {
    return this.request("POST", `/cases/${caseId}/stage2:skip`, {});
  }
}
