/**
 * Polling for 202-accepted generation jobs.
 *
 * The server answers `{stage}:generate` with an operation id; the client
 * polls GET /operations/{id} until it settles. Polling (not push) keeps
 * liveness dead simple at this scale: a 2-second base interval, backing
 * off multiplicatively toward a 10-second ceiling so an abandoned tab
 * stops hammering the server.
 */

import { ApiClient } from "./api.js";
import { ErrorEnvelope, OperationDoc } from "./types.js";

export const POLL_INTERVAL_MS = 2000;
export const POLL_BACKOFF_FACTOR = 1.5;
export const POLL_MAX_INTERVAL_MS = 10000;

export class OperationFailedError extends Error {
  readonly operation: OperationDoc;
  readonly envelope: ErrorEnvelope;

  constructor(operation: OperationDoc) {
    const envelope = operation.error ?? {
      code: "unknown_error",
      message: "operation failed without an error envelope",
      details: {},
    };
    super(envelope.message);
    this.name = "OperationFailedError";
    this.operation = operation;
    this.envelope = envelope;
  }
}

export type SleepFn = (ms: number) => Promise<void>;

const realSleep: SleepFn = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export interface PollOptions {
  intervalMs?: number;
  backoffFactor?: number;
  maxIntervalMs?: number;
  /** Give up after this many polls (0 = never). */
  maxPolls?: number;
  sleep?: SleepFn;
}

/**
 * Poll an operation until it succeeds or fails. Returns the succeeded
 * operation document; throws OperationFailedError on failure and a plain
 * Error when maxPolls runs out first.
 */
export async function pollOperation(
  client: ApiClient,
  operationId: string,
  options: PollOptions = {},
): Promise<OperationDoc> {
  const sleep = options.sleep ?? realSleep;
  const backoff = options.backoffFactor ?? POLL_BACKOFF_FACTOR;
  const ceiling = options.maxIntervalMs ?? POLL_MAX_INTERVAL_MS;
  const maxPolls = options.maxPolls ?? 0;
  let interval = options.intervalMs ?? POLL_INTERVAL_MS;
  let polls = 0;

  for (;;) {
    const operation = await client.getOperation(operationId);
    polls += 1;
    if (operation.status === "succeeded") return operation;
    if (operation.status === "failed") throw new OperationFailedError(operation);
    if (maxPolls > 0 && polls >= maxPolls) {
      throw new Error(`operation ${operationId} still running after ${polls} polls`);
    }
    await sleep(interval);
    interval = Math.min(Math.round(interval * backoff), ceiling);
  }
}
