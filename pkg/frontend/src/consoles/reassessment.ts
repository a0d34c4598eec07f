/**
 * Reassessment console: the initial → final table with a rationale per
 * criterion, plus the overall feedback paragraph. Final scores and
 * rationales are editable; editing a final score recomputes the delta so
 * the submitted document always satisfies delta = final − initial.
 */

import { ApproveStage } from "../api.js";
import { disabledAttr, escapeHtml, renderStaleBanner } from "../render.js";
import { clampScore, formatTenths, weightedTotalTenths } from "../scoring.js";
import { ClientViolation, validateReassessment } from "../validation.js";
import { InstructorCaseView, ReassessmentDoc } from "../types.js";
import { ApprovalConsole } from "./base.js";

export class ReassessmentConsole extends ApprovalConsole<ReassessmentDoc> {
  protected stage(): ApproveStage {
    return "reassessment";
  }

  protected extractDocument(view: InstructorCaseView): ReassessmentDoc | null {
    return view.reassessment;
  }

  draftViolations(): ClientViolation[] {
    const view = this.state.current;
    if (!view?.rubric) return [{ code: "missing_rubric", message: "no rubric on the case" }];
    return validateReassessment(this.requireDraft(), view.rubric, view.initial).violations;
  }

  // -- editing ---------------------------------------------------------------

  /** Set a final score; the entry's delta is recomputed alongside. */
  setFinalScore(index: number, score: number): number {
    const entry = this.entryAt(index);
    entry.final_score = clampScore(score);
    entry.delta = entry.final_score - entry.initial_score;
    return entry.final_score;
  }

  setRationale(index: number, rationale: string): void {
    this.entryAt(index).rationale = rationale;
  }

  setFinalFeedback(feedback: string): void {
    this.requireDraft().final_feedback = feedback;
  }

  private entryAt(index: number) {
    const entry = this.requireDraft().entries[index];
    if (entry === undefined) throw new Error(`no entry at index ${index}`);
    return entry;
  }

  // -- live total --------------------------------------------------------------

  liveFinalTotalTenths(): number {
    const rubric = this.state.current?.rubric;
    if (!rubric) throw new Error("no rubric on the case");
    const vector: Record<string, number> = {};
    for (const entry of this.requireDraft().entries) {
      vector[entry.criterion_name] = entry.final_score;
    }
    return weightedTotalTenths(rubric, vector);
  }

  // -- rendering ---------------------------------------------------------------

  render(): string {
    const view = this.state.current;
    if (view === null) return `<section class="console console-reassessment">Loading…</section>`;
    if (view.reassessment === null) {
      return `<section class="console console-reassessment"><p>No reassessment drafted yet.</p></section>`;
    }
    const doc = this.draft ?? view.reassessment;
    const total =
      this.draft !== null
        ? formatTenths(this.liveFinalTotalTenths())
        : formatTenths(doc.final_weighted_total_tenths);
    const rows = doc.entries
      .map(
        (entry, i) =>
          `<tr data-index="${i}">` +
          `<td>${escapeHtml(entry.criterion_name)}</td>` +
          `<td class="movement">${entry.initial_score} → ` +
          `<input data-edit="final-score" data-index="${i}" type="number" min="1" max="5" ` +
          `value="${entry.final_score}"> ` +
          `<span class="delta">(${entry.delta >= 0 ? `+${entry.delta}` : entry.delta})</span></td>` +
          `<td><textarea data-edit="rationale" data-index="${i}">` +
          `${escapeHtml(entry.rationale)}</textarea></td>` +
          `</tr>`,
      )
      .join("");
    const submittable = this.draft !== null && this.canSubmit() && this.state.staleBanner === null;
    return (
      `<section class="console console-reassessment">` +
      renderStaleBanner(this.state.staleBanner) +
      `<h2>Reassessment review</h2>` +
      `<table class="movement-table">` +
      `<thead><tr><th>Criterion</th><th>Initial → Final</th><th>Rationale</th></tr></thead>` +
      `<tbody>${rows}</tbody></table>` +
      `<p class="live-total">Final weighted total: <output>${escapeHtml(total)}</output></p>` +
      `<textarea data-edit="final-feedback">${escapeHtml(doc.final_feedback)}</textarea>` +
      `<form data-stage="reassessment">` +
      `<button type="submit" data-action="approve"${disabledAttr(!submittable)}>` +
      `Approve reassessment</button></form>` +
      `</section>`
    );
  }
}
