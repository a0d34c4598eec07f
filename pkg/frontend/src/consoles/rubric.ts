/**
 * Rubric console: review the drafted rubric, edit names, weights, and
 * level descriptors, watch the live weight-sum indicator, and approve.
 *
 * The submit button is disabled whenever the draft fails client
 * validation — most visibly when the weights do not sum to 100, where the
 * indicator shows the signed surplus (e.g. "+5") instead of a checkmark.
 */

import { ApproveStage } from "../api.js";
import { disabledAttr, escapeHtml, renderStaleBanner } from "../render.js";
import { ClientViolation, validateRubric } from "../validation.js";
import { InstructorCaseView, RubricDoc } from "../types.js";
import { ApprovalConsole } from "./base.js";

export class RubricEditor extends ApprovalConsole<RubricDoc> {
  protected stage(): ApproveStage {
    return "rubric";
  }

  protected extractDocument(view: InstructorCaseView): RubricDoc | null {
    return view.rubric;
  }

  draftViolations(): ClientViolation[] {
    const verdict = validateRubric(this.requireDraft());
    return verdict.violations;
  }

  // -- editing ---------------------------------------------------------------

  setCriterionName(index: number, name: string): void {
    const criterion = this.criterionAt(index);
    criterion.criterion_name = name;
  }

  setWeight(index: number, weight: number): void {
    const criterion = this.criterionAt(index);
    criterion.weight = weight;
  }

  setDescription(index: number, description: string): void {
    const criterion = this.criterionAt(index);
    criterion.description = description;
  }

  setLevelDescriptor(index: number, ordinal: number, desc: string): void {
    const criterion = this.criterionAt(index);
    const level = criterion.levels.find((l) => l.level === ordinal);
    if (level === undefined) throw new Error(`no level ${ordinal} on criterion ${index}`);
    level.desc = desc;
  }

  private criterionAt(index: number) {
    const criterion = this.requireDraft().criteria[index];
    if (criterion === undefined) throw new Error(`no criterion at index ${index}`);
    return criterion;
  }

  // -- weight indicator --------------------------------------------------------

  weightSum(): number {
    return this.requireDraft().criteria.reduce((sum, c) => sum + c.weight, 0);
  }

  /** "100 ✓" when balanced, otherwise the signed surplus, e.g. "+5". */
  weightSumIndicator(): string {
    const sum = this.weightSum();
    if (sum === 100) return "100 ✓";
    const surplus = sum - 100;
    return surplus > 0 ? `+${surplus}` : `${surplus}`;
  }

  // -- rendering ---------------------------------------------------------------

  render(): string {
    const view = this.state.current;
    if (view === null) return `<section class="console console-rubric">Loading…</section>`;
    if (view.rubric === null) {
      return `<section class="console console-rubric"><p>No rubric drafted yet.</p></section>`;
    }
    const doc = this.draft ?? view.rubric;
    const balanced = this.draft !== null ? this.weightSum() === 100 : true;
    const rows = doc.criteria
      .map((criterion, i) => {
        const levels = criterion.levels
          .map(
            (level) =>
              `<li data-level="${level.level}"><input data-edit="level-desc" ` +
              `data-criterion="${i}" data-ordinal="${level.level}" ` +
              `value="${escapeHtml(level.desc)}"></li>`,
          )
          .join("");
        return (
          `<fieldset class="criterion" data-index="${i}">` +
          `<input data-edit="name" data-criterion="${i}" value="${escapeHtml(criterion.criterion_name)}">` +
          `<input data-edit="weight" data-criterion="${i}" type="number" min="1" ` +
          `value="${escapeHtml(criterion.weight)}">` +
          `<textarea data-edit="description" data-criterion="${i}">` +
          `${escapeHtml(criterion.description)}</textarea>` +
          `<ol class="levels">${levels}</ol>` +
          `</fieldset>`
        );
      })
      .join("");
    const submittable = this.draft !== null && this.canSubmit() && this.state.staleBanner === null;
    return (
      `<section class="console console-rubric">` +
      renderStaleBanner(this.state.staleBanner) +
      `<h2>Rubric review</h2>` +
      `<p class="weight-indicator" data-balanced="${balanced}">Weights: ` +
      `<output>${escapeHtml(this.draft !== null ? this.weightSumIndicator() : "100 ✓")}</output></p>` +
      `<form data-stage="rubric">${rows}` +
      `<button type="submit" data-action="approve"${disabledAttr(!submittable)}>` +
      `Approve rubric</button></form>` +
      `</section>`
    );
  }
}
