/**
 * Question console: review drafted follow-up questions, edit text and
 * kind, delete down to one, add up to the three-question cap — a fourth
 * is blocked inline, before any request — then approve and send.
 *
 * Sending is a separate action from approving: approval freezes the set,
 * sending releases it to the student.
 */

import { ApproveStage } from "../api.js";
import { disabledAttr, escapeHtml, renderStaleBanner } from "../render.js";
import { ClientViolation, validateQuestionSet } from "../validation.js";
import {
  InstructorCaseView,
  MAX_QUESTIONS,
  QuestionDoc,
  QuestionKind,
  QuestionSetDoc,
} from "../types.js";
import { ApprovalConsole } from "./base.js";

export type AddQuestionResult = { added: true; question: QuestionDoc } | { added: false; reason: string };
export type RemoveQuestionResult = { removed: true } | { removed: false; reason: string };

export class QuestionConsole extends ApprovalConsole<QuestionSetDoc> {
  protected stage(): ApproveStage {
    return "questions";
  }

  protected extractDocument(view: InstructorCaseView): QuestionSetDoc | null {
    return view.questions;
  }

  draftViolations(): ClientViolation[] {
    const rubric = this.state.current?.rubric;
    if (!rubric) return [{ code: "missing_rubric", message: "no rubric on the case" }];
    return validateQuestionSet(this.requireDraft(), rubric).violations;
  }

  // -- editing ---------------------------------------------------------------

  setText(index: number, text: string): void {
    this.questionAt(index).text = text;
  }

  setKind(index: number, kind: QuestionKind, targetCriterion: string | null = null): void {
    const question = this.questionAt(index);
    question.kind = kind;
    if (targetCriterion !== null) question.target_criterion = targetCriterion;
  }

  setTargetCriterion(index: number, target: string | null): void {
    this.questionAt(index).target_criterion = target;
  }

  /** Add a question; blocked inline once the set holds the maximum of 3. */
  addQuestion(question: Omit<QuestionDoc, "question_id">): AddQuestionResult {
    const draft = this.requireDraft();
    if (draft.questions.length >= MAX_QUESTIONS) {
      return {
        added: false,
        reason: `a question set holds at most ${MAX_QUESTIONS} questions`,
      };
    }
    const used = new Set(draft.questions.map((q) => q.question_id));
    let n = draft.questions.length + 1;
    while (used.has(`q${n}`)) n += 1;
    const added: QuestionDoc = { question_id: `q${n}`, ...question };
    draft.questions.push(added);
    return { added: true, question: added };
  }

  /** Remove a question; the set may shrink to one but never to zero. */
  removeQuestion(index: number): RemoveQuestionResult {
    const draft = this.requireDraft();
    if (draft.questions.length <= 1) {
      return { removed: false, reason: "a question set must contain at least one question" };
    }
    if (draft.questions[index] === undefined) {
      return { removed: false, reason: `no question at index ${index}` };
    }
    draft.questions.splice(index, 1);
    return { removed: true };
  }

  /** Whether the add button is rendered enabled. */
  canAddQuestion(): boolean {
    return this.draft !== null && this.requireDraft().questions.length < MAX_QUESTIONS;
  }

  private questionAt(index: number): QuestionDoc {
    const question = this.requireDraft().questions[index];
    if (question === undefined) throw new Error(`no question at index ${index}`);
    return question;
  }

  // -- delivery ----------------------------------------------------------------

  /** Release the approved questions to the student. */
  async send(): Promise<InstructorCaseView> {
    const view = this.state.current;
    if (view === null) throw new Error("no case loaded");
    const updated = await this.client.sendQuestions(view.case_id);
    this.state.applyServerSnapshot(updated);
    return updated;
  }

  // -- rendering ---------------------------------------------------------------

  render(): string {
    const view = this.state.current;
    if (view === null) return `<section class="console console-questions">Loading…</section>`;
    if (view.questions === null) {
      return `<section class="console console-questions"><p>No questions drafted yet.</p></section>`;
    }
    const doc = this.draft ?? view.questions;
    const rows = doc.questions
      .map(
        (question, i) =>
          `<fieldset class="question" data-index="${i}" data-question-id="${escapeHtml(question.question_id)}">` +
          `<select data-edit="kind" data-index="${i}">` +
          `<option value="evaluative"${question.kind === "evaluative" ? " selected" : ""}>evaluative</option>` +
          `<option value="authenticity"${question.kind === "authenticity" ? " selected" : ""}>authenticity</option>` +
          `</select>` +
          `<textarea data-edit="text" data-index="${i}">${escapeHtml(question.text)}</textarea>` +
          `<span class="target">${escapeHtml(question.target_criterion ?? "—")}</span>` +
          `<button data-action="remove" data-index="${i}"${disabledAttr(doc.questions.length <= 1)}>Remove</button>` +
          `</fieldset>`,
      )
      .join("");
    const addBlocked = doc.questions.length >= MAX_QUESTIONS;
    const submittable = this.draft !== null && this.canSubmit() && this.state.staleBanner === null;
    return (
      `<section class="console console-questions">` +
      renderStaleBanner(this.state.staleBanner) +
      `<h2>Follow-up question review</h2>` +
      `<form data-stage="questions">${rows}` +
      `<button data-action="add-question"${disabledAttr(addBlocked)} ` +
      `title="${addBlocked ? `at most ${MAX_QUESTIONS} questions` : "add a question"}">Add question</button>` +
      `<button type="submit" data-action="approve"${disabledAttr(!submittable)}>Approve questions</button>` +
      `<button data-action="send"${disabledAttr(!view.allowed_actions.includes("QuestionsSent"))}>` +
      `Send to student</button></form>` +
      `</section>`
    );
  }
}
