/**
 * Score console: per-criterion steppers (1-5) and justification editors,
 * with the weighted total recomputed live by the same integer formula the
 * server uses — so the preview always matches what approval will store.
 *
 * The draft's stored `weighted_total_tenths` is deliberately left
 * untouched: it is a server-managed field, so the live total is computed
 * on the side and never enters the submitted edits.
 */

import { ApproveStage } from "../api.js";
import { disabledAttr, escapeHtml, renderStaleBanner } from "../render.js";
import { clampScore, formatTenths, weightedTotalTenths } from "../scoring.js";
import { ClientViolation, validateInitialScores } from "../validation.js";
import { InitialAssessmentDoc, InstructorCaseView } from "../types.js";
import { ApprovalConsole } from "./base.js";

export class ScoreReview extends ApprovalConsole<InitialAssessmentDoc> {
  protected stage(): ApproveStage {
    return "scores";
  }

  protected extractDocument(view: InstructorCaseView): InitialAssessmentDoc | null {
    return view.initial;
  }

  draftViolations(): ClientViolation[] {
    const rubric = this.state.current?.rubric;
    if (!rubric) return [{ code: "missing_rubric", message: "no rubric on the case" }];
    return validateInitialScores(this.requireDraft(), rubric).violations;
  }

  // -- editing ---------------------------------------------------------------

  /** Step a score up or down; the stepper clamps at the 1-5 ends. */
  step(index: number, delta: 1 | -1): number {
    const row = this.scoreAt(index);
    row.score = clampScore(row.score + delta);
    return row.score;
  }

  /** Set a score directly; out-of-range attempts clamp instead of erroring. */
  setScore(index: number, score: number): number {
    const row = this.scoreAt(index);
    row.score = clampScore(score);
    return row.score;
  }

  setJustification(index: number, justification: string): void {
    this.scoreAt(index).justification = justification;
  }

  private scoreAt(index: number) {
    const row = this.requireDraft().scores[index];
    if (row === undefined) throw new Error(`no score row at index ${index}`);
    return row;
  }

  // -- live total --------------------------------------------------------------

  /** Weighted total of the draft scores, in integer tenths of a point. */
  liveTotalTenths(): number {
    const rubric = this.state.current?.rubric;
    if (!rubric) throw new Error("no rubric on the case");
    const vector: Record<string, number> = {};
    for (const row of this.requireDraft().scores) {
      vector[row.criterion_name] = row.score;
    }
    return weightedTotalTenths(rubric, vector);
  }

  liveTotalDisplay(): string {
    return formatTenths(this.liveTotalTenths());
  }

  // -- rendering ---------------------------------------------------------------

  render(): string {
    const view = this.state.current;
    if (view === null) return `<section class="console console-scores">Loading…</section>`;
    if (view.initial === null) {
      return `<section class="console console-scores"><p>No scores drafted yet.</p></section>`;
    }
    const doc = this.draft ?? view.initial;
    const total =
      this.draft !== null ? this.liveTotalDisplay() : formatTenths(doc.weighted_total_tenths);
    const rows = doc.scores
      .map(
        (row, i) =>
          `<fieldset class="score-row" data-index="${i}">` +
          `<span class="criterion-name">${escapeHtml(row.criterion_name)}</span>` +
          `<button data-action="step-down" data-index="${i}">−</button>` +
          `<output class="score" data-index="${i}">${row.score}</output>` +
          `<button data-action="step-up" data-index="${i}">+</button>` +
          `<textarea data-edit="justification" data-index="${i}">` +
          `${escapeHtml(row.justification)}</textarea>` +
          `</fieldset>`,
      )
      .join("");
    const submittable = this.draft !== null && this.canSubmit() && this.state.staleBanner === null;
    return (
      `<section class="console console-scores">` +
      renderStaleBanner(this.state.staleBanner) +
      `<h2>Initial score review</h2>` +
      `<p class="live-total">Weighted total: <output>${escapeHtml(total)}</output></p>` +
      `<form data-stage="scores">${rows}` +
      `<button type="submit" data-action="approve"${disabledAttr(!submittable)}>` +
      `Approve scores</button></form>` +
      `</section>`
    );
  }
}
