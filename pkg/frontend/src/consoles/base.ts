/**
 * Shared machinery for the three edit-and-approve consoles (rubric,
 * scores, reassessment) and the question console.
 *
 * A console holds a deep-copied draft of one artifact document. Editing
 * mutates only the draft; `edits()` diffs the draft against the snapshot's
 * artifact, and `submit()` posts those edits to the stage's approve
 * endpoint. Whatever case view the server returns is installed verbatim
 * via ViewState.applyServerSnapshot — the console never guesses the next
 * state. A 409 reply becomes the stale-state banner instead of a retry.
 */

import { ApiClient, ApiError, ApproveStage } from "../api.js";
import { cloneDocument, computeDiff } from "../diff.js";
import { ViewState } from "../state.js";
import { EditEntry, InstructorCaseView } from "../types.js";
import { ClientViolation } from "../validation.js";

/** Document roots the server manages; an edit under one is refused (422). */
export const PROTECTED_ROOTS: readonly string[] = [
  "schema_version",
  "provenance",
  "rubric_id",
  "assignment_id",
  "version",
  "weighted_total_tenths",
  "final_weighted_total_tenths",
];

export type SubmitResult =
  | { submitted: true; view: InstructorCaseView }
  | { submitted: false; reason: "validation"; violations: ClientViolation[] }
  | { submitted: false; reason: "stale"; message: string }
  | { submitted: false; reason: "no_draft" };

function pathRoot(path: string): string {
  const match = /^[^.[\]]+/.exec(path);
  return match ? match[0] : path;
}

export abstract class ApprovalConsole<TDoc> {
  protected readonly client: ApiClient;
  readonly state: ViewState;
  protected draft: TDoc | null = null;
  protected original: TDoc | null = null;

  constructor(client: ApiClient, state: ViewState) {
    this.client = client;
    this.state = state;
  }

  /** The approve endpoint this console posts to. */
  protected abstract stage(): ApproveStage;

  /** Pull this console's artifact document out of a case snapshot. */
  protected abstract extractDocument(view: InstructorCaseView): TDoc | null;

  /** Client-side verdict for the current draft. */
  abstract draftViolations(): ClientViolation[];

  /** (Re)build the editable draft from the current server snapshot. */
  beginEditing(): boolean {
    const view = this.state.current;
    if (view === null) return false;
    const document = this.extractDocument(view);
    if (document === null) return false;
    this.original = document;
    this.draft = cloneDocument(document);
    return true;
  }

  protected requireDraft(): TDoc {
    if (this.draft === null) {
      throw new Error("beginEditing() must succeed before editing the draft");
    }
    return this.draft;
  }

  /** Pending edits as field-path entries, the approve endpoint's unit. */
  edits(): EditEntry[] {
    if (this.draft === null || this.original === null) return [];
    const entries = computeDiff(this.original, this.draft);
    for (const entry of entries) {
      if (PROTECTED_ROOTS.includes(pathRoot(entry.path))) {
        throw new Error(`console produced an edit under a protected root: ${entry.path}`);
      }
    }
    return entries;
  }

  canSubmit(): boolean {
    return this.draft !== null && this.draftViolations().length === 0;
  }

  /**
   * Validate locally, then post the edits. On success the server's case
   * view replaces the snapshot; on 409 the stale banner is raised and the
   * draft is kept so the user can reconcile after refreshing.
   */
  async submit(): Promise<SubmitResult> {
    const view = this.state.current;
    if (view === null || this.draft === null) return { submitted: false, reason: "no_draft" };
    const violations = this.draftViolations();
    if (violations.length > 0) {
      return { submitted: false, reason: "validation", violations };
    }
    try {
      const updated = await this.client.approve(view.case_id, this.stage(), this.edits());
      this.state.applyServerSnapshot(updated);
      this.original = null;
      this.draft = null;
      return { submitted: true, view: updated };
    } catch (error) {
      if (error instanceof ApiError && this.state.markStale(error)) {
        return { submitted: false, reason: "stale", message: error.message };
      }
      throw error;
    }
  }

  /** Re-fetch the case; the fresh snapshot clears the stale banner. */
  async refresh(): Promise<InstructorCaseView> {
    const view = this.state.current;
    if (view === null) throw new Error("no case loaded");
    const fresh = await this.client.getCase(view.case_id);
    this.state.applyServerSnapshot(fresh);
    this.original = null;
    this.draft = null;
    return fresh;
  }
}
