/**
 * Stage pages: one console per workflow stage on its own page, linked
 * from the case timeline. The page owns the shared ViewState, runs the
 * generate → poll → refresh loop for 202 operations, and otherwise just
 * delegates to the active console.
 */

import { ApiClient, GenerateStage } from "./api.js";
import { QuestionConsole } from "./consoles/questions.js";
import { ReassessmentConsole } from "./consoles/reassessment.js";
import { RubricEditor } from "./consoles/rubric.js";
import { ScoreReview } from "./consoles/scores.js";
import { escapeHtml } from "./render.js";
import { pollOperation, PollOptions } from "./poll.js";
import { ViewState } from "./state.js";
import { CaseTimeline } from "./timeline.js";
import { InstructorCaseView } from "./types.js";

export type StagePageName = "rubric" | "scores" | "questions" | "reassessment" | "timeline";

export const STAGE_PAGES: readonly StagePageName[] = [
  "rubric",
  "scores",
  "questions",
  "reassessment",
  "timeline",
];

export class CasePage {
  readonly state: ViewState;
  readonly rubric: RubricEditor;
  readonly scores: ScoreReview;
  readonly questions: QuestionConsole;
  readonly reassessment: ReassessmentConsole;
  readonly timeline: CaseTimeline;
  active: StagePageName = "rubric";

  private readonly client: ApiClient;
  private readonly caseId: string;

  constructor(client: ApiClient, caseId: string) {
    this.client = client;
    this.caseId = caseId;
    this.state = new ViewState();
    this.rubric = new RubricEditor(client, this.state);
    this.scores = new ScoreReview(client, this.state);
    this.questions = new QuestionConsole(client, this.state);
    this.reassessment = new ReassessmentConsole(client, this.state);
    this.timeline = new CaseTimeline(client, caseId);
  }

  async load(): Promise<InstructorCaseView> {
    const view = await this.client.getCase(this.caseId);
    this.state.applyServerSnapshot(view);
    return view;
  }

  navigate(page: StagePageName): void {
    this.active = page;
  }

  /**
   * Kick off a generation stage: POST {stage}:generate, poll the returned
   * operation on the standard cadence, then re-fetch the case so the new
   * draft appears. The operation handle is visible on the ViewState for
   * the duration so the page can show a spinner.
   */
  async generate(stage: GenerateStage, poll: PollOptions = {}): Promise<InstructorCaseView> {
    const accepted = await this.client.generate(this.caseId, stage);
    this.state.trackOperation({ operationId: accepted.operation_id, stage });
    try {
      await pollOperation(this.client, accepted.operation_id, poll);
    } finally {
      this.state.releaseOperation(accepted.operation_id);
    }
    const view = await this.client.getCase(this.caseId);
    this.state.applyServerSnapshot(view);
    return view;
  }

  renderNav(): string {
    const links = STAGE_PAGES.map((page) => {
      const current = page === this.active ? ` aria-current="page"` : "";
      return `<a href="#/cases/${escapeHtml(this.caseId)}/${page}"${current}>${page}</a>`;
    }).join("");
    const busy = this.state.operationHandles.length > 0;
    return (
      `<nav class="stage-nav" data-busy="${busy}">${links}` +
      (busy ? `<span class="spinner" role="status">Generating…</span>` : "") +
      `</nav>`
    );
  }

  render(): string {
    const body = {
      rubric: () => this.rubric.render(),
      scores: () => this.scores.render(),
      questions: () => this.questions.render(),
      reassessment: () => this.reassessment.render(),
      timeline: () => this.timeline.render(),
    }[this.active]();
    return `<main class="case-page">${this.renderNav()}${body}</main>`;
  }
}
