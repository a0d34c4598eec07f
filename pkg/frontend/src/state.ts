/**
 * Per-case view state shared by the stage consoles.
 *
 * The load-bearing invariant: `current` is only ever written from a server
 * response. Consoles accumulate pending edits locally and preview their
 * effect, but no UI code computes a state transition — every state change
 * is whatever the server said after a round-trip. `applyServerSnapshot` is
 * the single write path, and the stale-state banner is the one piece of
 * purely local state (it records that the server refused a write with 409
 * until the next refresh).
 */

import { ApiError } from "./api.js";
import { EditEntry, InstructorCaseView } from "./types.js";

export interface StaleBanner {
  /** Error code the server answered with (conflict / illegal_transition). */
  code: string;
  message: string;
}

export interface OperationHandle {
  operationId: string;
  stage: string;
}

export class ViewState {
  #current: InstructorCaseView | null = null;

  /** Local, not-yet-submitted edits as field-path entries. */
  pendingEdits: EditEntry[] = [];

  /** Outstanding 202 operations being polled. */
  readonly operationHandles: OperationHandle[] = [];

  /** Set when the server refused a write because this tab was stale. */
  staleBanner: StaleBanner | null = null;

  /** The last server snapshot; null before the first load. */
  get current(): InstructorCaseView | null {
    return this.#current;
  }

  /**
   * Install a case snapshot received from the server. This is the only
   * write path to `current`; a fresh snapshot also clears the stale
   * banner, because the tab is no longer behind.
   */
  applyServerSnapshot(view: InstructorCaseView): void {
    this.#current = view;
    this.staleBanner = null;
    this.pendingEdits = [];
  }

  /**
   * Record that the server refused a write for staleness. 409 means this
   * tab's snapshot is behind (someone else advanced the case); the banner
   * tells the user to refresh before retrying.
   */
  markStale(error: ApiError): boolean {
    if (error.status !== 409) return false;
    this.staleBanner = {
      code: error.code,
      message: `${error.message} — this case changed in another session; refresh to continue.`,
    };
    return true;
  }

  trackOperation(handle: OperationHandle): void {
    this.operationHandles.push(handle);
  }

  releaseOperation(operationId: string): void {
    const index = this.operationHandles.findIndex((h) => h.operationId === operationId);
    if (index >= 0) this.operationHandles.splice(index, 1);
  }
}
