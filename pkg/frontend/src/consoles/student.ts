/**
 * Student view: the submission author's window into their own case.
 *
 * The student sees approved follow-up questions once sent, posts
 * responses, and — only after the case is finalized (or the instructor
 * opted to reveal initial scores) — reads scores and feedback. Score
 * gating is enforced server-side in the student payload; this view adds
 * the client half of the guarantee by fetching nothing but its own case
 * endpoint, so there is no request path that could even carry score data
 * early. The network log makes that checkable.
 */

import { ApiClient } from "../api.js";
import { escapeHtml } from "../render.js";
import { formatTenths } from "../scoring.js";
import { StudentCaseView } from "../types.js";

export class StudentView {
  private readonly client: ApiClient;
  private readonly caseId: string;
  #current: StudentCaseView | null = null;

  constructor(client: ApiClient, caseId: string) {
    this.client = client;
    this.caseId = caseId;
  }

  /** The last server payload; null before the first load. */
  get current(): StudentCaseView | null {
    return this.#current;
  }

  async load(): Promise<StudentCaseView> {
    const view = await this.client.getStudentCase(this.caseId);
    this.#current = view;
    return view;
  }

  /** Questions still waiting for a response, in server order. */
  unansweredQuestions(): Array<{ question_id: string; text: string }> {
    const view = this.#current;
    if (view === null) return [];
    const answered = new Set(view.responses.map((r) => r.question_id));
    return view.questions
      .filter((q) => !answered.has(q.question_id))
      .map((q) => ({ question_id: q.question_id, text: q.text }));
  }

  async submitResponse(questionId: string, body: string): Promise<StudentCaseView> {
    const view = await this.client.submitResponse(this.caseId, {
      question_id: questionId,
      body,
    });
    this.#current = view;
    return view;
  }

  render(): string {
    const view = this.#current;
    if (view === null) return `<section class="student-view">Loading…</section>`;

    const header =
      `<h2>Assignment ${escapeHtml(view.assignment_id)}</h2>` +
      `<p class="status" data-status="${escapeHtml(view.status)}">` +
      `${escapeHtml(statusLabel(view.status))}</p>`;

    const questions =
      view.questions.length === 0
        ? ""
        : `<section class="questions"><h3>Follow-up questions</h3><ol>` +
          view.questions
            .map((q) => {
              const response = view.responses.find((r) => r.question_id === q.question_id);
              const answer = response
                ? `<blockquote class="response">${escapeHtml(response.body)}</blockquote>`
                : `<form data-action="respond" data-question-id="${escapeHtml(q.question_id)}">` +
                  `<textarea name="body"></textarea><button type="submit">Send response</button></form>`;
              return `<li data-question-id="${escapeHtml(q.question_id)}">${escapeHtml(q.text)}${answer}</li>`;
            })
            .join("") +
          `</ol></section>`;

    const initialScores =
      view.initial_scores === null
        ? ""
        : `<section class="initial-scores"><h3>Initial scores</h3><ul>` +
          view.initial_scores.scores
            .map(
              (s) =>
                `<li>${escapeHtml(s.criterion_name)}: <output>${s.score}</output> — ` +
                `${escapeHtml(s.justification)}</li>`,
            )
            .join("") +
          `</ul></section>` +
          `<p class="initial-total">Initial weighted total: ` +
          `<output>${escapeHtml(view.initial_scores.weighted_total_display)}</output></p>`;

    const final =
      view.final === null
        ? ""
        : `<section class="final"><h3>Final assessment</h3><ul>` +
          view.final.scores
            .map((s) => `<li>${escapeHtml(s.criterion_name)}: <output>${s.final_score}</output></li>`)
            .join("") +
          `</ul><p class="final-total">Weighted total: ` +
          `<output>${escapeHtml(formatTenths(view.final.weighted_total_tenths))}</output></p>` +
          (view.final.feedback === null
            ? ""
            : `<p class="feedback">${escapeHtml(view.final.feedback)}</p>`) +
          `</section>`;

    return `<section class="student-view">${header}${questions}${initialScores}${final}</section>`;
  }
}

function statusLabel(status: StudentCaseView["status"]): string {
  switch (status) {
    case "awaiting_your_responses":
      return "Your responses are requested";
    case "complete":
      return "Assessment complete";
    default:
      return "Assessment in progress";
  }
}
