/**
 * Case timeline: the event log rendered as a vertical history, one row
 * per event in sequence order, linking each stage's events to its
 * console page. The log comes from the exported audit bundle — the same
 * hash-chained record an auditor would read, not a UI-side reconstruction.
 */

import { ApiClient } from "./api.js";
import { escapeHtml } from "./render.js";
import { AuditBundle, EventDoc } from "./types.js";

/** Which console page an event kind belongs to (unmapped kinds get none). */
export const EVENT_STAGE_PAGES: Readonly<Record<string, string>> = {
  RubricGenerated: "rubric",
  RubricApproved: "rubric",
  ScoresGenerated: "scores",
  ScoresApproved: "scores",
  QuestionsGenerated: "questions",
  QuestionsApproved: "questions",
  QuestionsSent: "questions",
  ResponseRecorded: "questions",
  ReassessmentGenerated: "reassessment",
  ReassessmentApproved: "reassessment",
  Stage2SkipRequested: "reassessment",
};

export class CaseTimeline {
  private readonly client: ApiClient;
  private readonly caseId: string;
  #bundle: AuditBundle | null = null;

  constructor(client: ApiClient, caseId: string) {
    this.client = client;
    this.caseId = caseId;
  }

  get events(): EventDoc[] {
    return this.#bundle?.events ?? [];
  }

  async load(): Promise<AuditBundle> {
    this.#bundle = await this.client.getExport(this.caseId);
    return this.#bundle;
  }

  render(): string {
    const bundle = this.#bundle;
    if (bundle === null) return `<section class="timeline">Loading…</section>`;
    const rows = [...bundle.events]
      .sort((a, b) => a.sequence - b.sequence)
      .map((event) => {
        const page = EVENT_STAGE_PAGES[event.kind];
        const label = page
          ? `<a href="#/cases/${escapeHtml(this.caseId)}/${page}">${escapeHtml(event.kind)}</a>`
          : escapeHtml(event.kind);
        return (
          `<li class="event" data-sequence="${event.sequence}" data-kind="${escapeHtml(event.kind)}">` +
          `<span class="seq">#${event.sequence}</span> ${label} ` +
          `<span class="actor">${escapeHtml(event.actor_ref)}</span> ` +
          `<time datetime="${escapeHtml(event.occurred_at)}">${escapeHtml(event.occurred_at)}</time>` +
          `</li>`
        );
      })
      .join("");
    return (
      `<section class="timeline">` +
      `<h2>Case history</h2>` +
      `<p class="bundle-hash">Audit bundle <code>${escapeHtml(bundle.bundle_hash)}</code></p>` +
      `<ol class="events">${rows}</ol>` +
      `</section>`
    );
  }
}
