/**
 * Shared test scaffolding: typed loaders for the captured server payloads
 * in fixtures/views.json, and a route-table fake transport so console
 * tests exercise the real ApiClient request path (headers, idempotency
 * keys, error envelopes) without a socket.
 */

import { readFileSync } from "node:fs";

import { ApiClient, HttpRequest, HttpResponse, HttpTransport } from "../src/api.js";
import { cloneDocument } from "../src/diff.js";
import { AuditBundle, InstructorCaseView, StudentCaseView } from "../src/types.js";

const viewFixtures: Record<string, unknown> = JSON.parse(
  readFileSync(new URL("./fixtures/views.json", import.meta.url), "utf8"),
);

function fixture<T>(key: string): T {
  const found = viewFixtures[key];
  if (found === undefined) {
    throw new Error(`no captured fixture named '${key}'`);
  }
  return cloneDocument(found) as T;
}

/** Instructor case view captured at a pipeline stage, deep-copied. */
export function instructorFixture(stage: string): InstructorCaseView {
  return fixture(`instructor/${stage}`);
}

/** Student case view captured at a pipeline stage, deep-copied. */
export function studentFixture(stage: string): StudentCaseView {
  return fixture(`student/${stage}`);
}

/** The finalized case's exported audit bundle. */
export function bundleFixture(): AuditBundle {
  return fixture("bundle/finalized");
}

export type RouteHandler = (request: HttpRequest) => { status: number; body: unknown };

/**
 * Minimal in-memory server: handlers registered per "METHOD /api/v1/..."
 * route, every request recorded. Handlers registered repeatedly for the
 * same route are consumed in order (so a test can script "first call
 * succeeds, second conflicts"); the last one sticks.
 */
export class FakeServer {
  readonly requests: HttpRequest[] = [];
  private readonly routes = new Map<string, RouteHandler[]>();

  route(method: "GET" | "POST", path: string, handler: RouteHandler | unknown): this {
    const key = `${method} /api/v1${path}`;
    const queue = this.routes.get(key) ?? [];
    queue.push(typeof handler === "function" ? (handler as RouteHandler) : () => ({ status: 200, body: handler }));
    this.routes.set(key, queue);
    return this;
  }

  transport(): HttpTransport {
    return async (request): Promise<HttpResponse> => {
      this.requests.push(request);
      const key = `${request.method} ${request.url}`;
      const queue = this.routes.get(key);
      if (queue === undefined || queue.length === 0) {
        return {
          status: 404,
          bodyText: JSON.stringify({
            code: "not_found",
            message: `no route for ${key}`,
            details: {},
          }),
        };
      }
      const handler = queue.length > 1 ? (queue.shift() as RouteHandler) : queue[0]!;
      const { status, body } = handler(request);
      return { status, bodyText: body === undefined ? "" : JSON.stringify(body) };
    };
  }

  client(token = "itok"): ApiClient {
    let counter = 0;
    return new ApiClient({
      baseUrl: "",
      token,
      transport: this.transport(),
      newIdempotencyKey: () => `test-${(counter += 1).toString().padStart(4, "0")}`,
    });
  }
}

/** A 409 conflict envelope, as the workflow engine answers stale writes. */
export function conflictBody(message = "event does not apply in state ScoresApproved"): {
  status: number;
  body: unknown;
} {
  return {
    status: 409,
    body: { code: "illegal_transition", message, details: { state: "ScoresApproved" } },
  };
}
