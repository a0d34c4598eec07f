/**
 * Client-side validators for untrusted artifact documents.
 *
 * These mirror the server validators rule for rule so the consoles can
 * block a bad submit before the network round-trip. Agreement with the
 * server is not aspirational: a committed fixture corpus carries server
 * verdicts, and the contract test asserts these functions reproduce every
 * one of them (same accept/reject outcome, same violation codes). The
 * server stays authoritative — a client accept is a prediction, never a
 * state change.
 *
 * One wire-format note: JSON has a single number type, so `3.0` and `3`
 * arrive here as the same value. The corpus therefore only probes
 * non-integers with a fractional part.
 */

import {
  CriterionDoc,
  CriterionScoreDoc,
  InitialAssessmentDoc,
  LEVEL_ORDINALS,
  MAX_QUESTIONS,
  PerformanceLevelDoc,
  Provenance,
  QuestionDoc,
  QuestionKind,
  QuestionSetDoc,
  QUESTION_KINDS,
  ReassessedCriterionDoc,
  ReassessmentDoc,
  RubricDoc,
  SCHEMA_VERSION,
  SCORE_MAX,
  SCORE_MIN,
} from "./types.js";
import { isPlainInteger, isScoreValue, weightedTotalTenths } from "./scoring.js";

export interface ClientViolation {
  code: string;
  message: string;
}

export type Verdict<T> =
  | { ok: true; artifact: T; violations: [] }
  | { ok: false; artifact: null; violations: ClientViolation[] };

function accept<T>(artifact: T): Verdict<T> {
  return { ok: true, artifact, violations: [] };
}

function reject<T>(violations: ClientViolation[]): Verdict<T> {
  return { ok: false, artifact: null, violations };
}

/** Sorted, de-duplicated violation codes — the unit of server agreement. */
export function violationCodes(verdict: Verdict<unknown>): string[] {
  return [...new Set(verdict.violations.map((v) => v.code))].sort();
}

function isDocument(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function isText(value: unknown): value is string {
  return typeof value === "string" && value.trim() !== "";
}

/** Criterion identity key: trimmed, case-insensitive. */
export function canonName(name: string): string {
  return name.trim().toLowerCase();
}

function v(code: string, message: string): ClientViolation {
  return { code, message };
}

const malformed = (path: string, expected: string) =>
  v("malformed_field", `field at ${path} is missing or not ${expected}`);
const emptyText = (path: string) => v("empty_text", `text at ${path} must be nonempty`);
const emptyDescriptor = (path: string) =>
  v("empty_descriptor", `descriptor text at ${path} must be nonempty`);
const scoreRange = (path: string, score: unknown) =>
  v("score_range", `score at ${path} is ${score}; scores are integers 1-5`);

function checkSchemaVersion(doc: Record<string, unknown>, out: ClientViolation[]): void {
  const found = "schema_version" in doc ? doc["schema_version"] : SCHEMA_VERSION;
  if (found !== SCHEMA_VERSION) {
    out.push(v("schema_version", `unsupported schema_version '${found}' (expected '1')`));
  }
}

// -- rubric ------------------------------------------------------------------

export function validateRubric(candidate: unknown): Verdict<RubricDoc> {
  const violations: ClientViolation[] = [];
  if (!isDocument(candidate)) {
    return reject([malformed(".", "rubric document object")]);
  }
  checkSchemaVersion(candidate, violations);

  const rawCriteria = candidate["criteria"];
  if (!Array.isArray(rawCriteria)) {
    violations.push(malformed("criteria", "array of criteria"));
    return reject(violations);
  }
  if (rawCriteria.length === 0) {
    violations.push(v("empty_rubric", "rubric must contain at least one criterion"));
    return reject(violations);
  }

  let weightsOk = true;
  const seenNames = new Set<string>();
  const parsed: Array<CriterionDoc | null> = [];
  for (let i = 0; i < rawCriteria.length; i++) {
    const raw = rawCriteria[i];
    const base = `criteria[${i}]`;
    if (!isDocument(raw)) {
      violations.push(malformed(base, "criterion object"));
      weightsOk = false;
      parsed.push(null);
      continue;
    }

    let name = raw["criterion_name"];
    if (!isText(name)) {
      violations.push(emptyText(`${base}.criterion_name`));
      name = null;
    } else if (seenNames.has(canonName(name))) {
      violations.push(v("duplicate_criterion", `criterion name '${name}' appears more than once`));
      name = null;
    } else {
      seenNames.add(canonName(name));
    }

    let weight = raw["weight"];
    if (!isPlainInteger(weight) || weight < 1) {
      violations.push(
        v(
          "invalid_weight",
          `criterion '${name ?? base}' has weight ${weight}; weights are integers >= 1`,
        ),
      );
      weightsOk = false;
      weight = null;
    }

    let description = raw["description"];
    if (!isText(description)) {
      violations.push(emptyDescriptor(`${base}.description`));
      description = null;
    }

    const levels = validateLevels(raw["levels"], (name as string) ?? base, base, violations);

    if (name && weight && description && levels !== null) {
      parsed.push({
        criterion_name: name as string,
        weight: weight as number,
        description: description as string,
        levels,
      });
    } else {
      parsed.push(null);
    }
  }

  if (weightsOk) {
    let total = 0;
    for (const raw of rawCriteria) {
      if (isDocument(raw)) total += raw["weight"] as number;
    }
    if (total !== 100) {
      violations.push(v("weight_sum", `criterion weights must sum to 100, got ${total}`));
    }
  }

  if (violations.length > 0) return reject(violations);

  const criteria = parsed.filter((c): c is CriterionDoc => c !== null);
  return accept({
    schema_version: SCHEMA_VERSION,
    rubric_id: (candidate["rubric_id"] as string) ?? "",
    assignment_id: (candidate["assignment_id"] as string) ?? "",
    provenance: ((candidate["provenance"] as Provenance) ?? "generated") as Provenance,
    version: (candidate["version"] as number) ?? 1,
    criteria,
  });
}

function validateLevels(
  rawLevels: unknown,
  criterionLabel: string,
  base: string,
  out: ClientViolation[],
): PerformanceLevelDoc[] | null {
  if (!Array.isArray(rawLevels)) {
    out.push(malformed(`${base}.levels`, "array of levels"));
    return null;
  }
  const ordinals: number[] = [];
  const parsed: Array<PerformanceLevelDoc | null> = [];
  let ok = true;
  for (let j = 0; j < rawLevels.length; j++) {
    const raw = rawLevels[j];
    const path = `${base}.levels[${j}]`;
    if (!isDocument(raw)) {
      out.push(malformed(path, "level object"));
      ok = false;
      continue;
    }
    let level = raw["level"];
    if (!isPlainInteger(level)) {
      out.push(malformed(`${path}.level`, "integer 1-5"));
      ok = false;
      level = null;
    } else {
      ordinals.push(level as number);
    }
    let desc = raw["desc"];
    if (!isText(desc)) {
      out.push(emptyDescriptor(`${path}.desc`));
      ok = false;
      desc = null;
    }
    if (
      level !== null &&
      (LEVEL_ORDINALS as readonly number[]).includes(level as number) &&
      desc !== null
    ) {
      parsed.push({ level: level as number, desc: desc as string });
    } else {
      parsed.push(null);
    }
  }

  const missing = LEVEL_ORDINALS.filter((o) => !ordinals.includes(o));
  if (missing.length > 0) {
    out.push(
      v(
        "missing_levels",
        `criterion '${criterionLabel}' is missing performance levels ${missing.join(", ")}`,
      ),
    );
    ok = false;
  }
  const unexpected = [
    ...new Set(
      ordinals.filter(
        (o) =>
          !(LEVEL_ORDINALS as readonly number[]).includes(o) ||
          ordinals.filter((x) => x === o).length > 1,
      ),
    ),
  ].sort((a, b) => a - b);
  if (unexpected.length > 0) {
    out.push(
      v(
        "unexpected_levels",
        `criterion '${criterionLabel}' has duplicate or out-of-range level ordinals: ` +
          `${unexpected.join(", ")} (exactly one each of 1-5 required)`,
      ),
    );
    ok = false;
  }
  if (!ok || parsed.some((p) => p === null)) return null;
  return parsed as PerformanceLevelDoc[];
}

// -- question set ------------------------------------------------------------

function rubricHasCriterion(rubric: RubricDoc, name: string): boolean {
  const key = name.trim();
  return rubric.criteria.some((c) => c.criterion_name.trim() === key);
}

export function validateQuestionSet(
  candidate: unknown,
  rubric: RubricDoc,
): Verdict<QuestionSetDoc> {
  const violations: ClientViolation[] = [];
  let rawQuestions: unknown;
  if (isDocument(candidate)) {
    checkSchemaVersion(candidate, violations);
    rawQuestions = candidate["questions"];
  } else {
    rawQuestions = candidate;
  }
  if (!Array.isArray(rawQuestions)) {
    violations.push(malformed("questions", "array of questions"));
    return reject(violations);
  }

  if (rawQuestions.length === 0) {
    violations.push(v("empty_question_set", "a question set must contain at least one question"));
    return reject(violations);
  }
  if (rawQuestions.length > MAX_QUESTIONS) {
    violations.push(
      v("too_many_questions", `a question set holds at most 3 questions, got ${rawQuestions.length}`),
    );
  }

  const seenIds = new Set<string>();
  const parsed: Array<QuestionDoc | null> = [];
  for (let i = 0; i < rawQuestions.length; i++) {
    const raw = rawQuestions[i];
    const base = `questions[${i}]`;
    if (!isDocument(raw)) {
      violations.push(malformed(base, "question object"));
      parsed.push(null);
      continue;
    }

    let questionId = raw["question_id"];
    if (questionId === undefined || questionId === null) {
      questionId = `q${i + 1}`;
    } else if (!isText(questionId)) {
      violations.push(emptyText(`${base}.question_id`));
      questionId = `q${i + 1}`;
    }
    if (seenIds.has(questionId as string)) {
      violations.push(
        v("duplicate_question_id", `question id '${questionId}' appears more than once`),
      );
      parsed.push(null);
      continue;
    }
    seenIds.add(questionId as string);

    const kindRaw = raw["kind"];
    if (!QUESTION_KINDS.includes(kindRaw as QuestionKind)) {
      violations.push(malformed(`${base}.kind`, "evaluative or authenticity"));
      parsed.push(null);
      continue;
    }
    const kind = kindRaw as QuestionKind;

    const text = raw["text"];
    const textOk = isText(text);
    if (!textOk) {
      violations.push(emptyText(`${base}.text`));
    }

    const target = raw["target_criterion"] ?? null;
    let targetOk = true;
    if (target !== null && typeof target !== "string") {
      violations.push(malformed(`${base}.target_criterion`, "string or null"));
      targetOk = false;
    } else if (kind === "evaluative" && !isText(target)) {
      violations.push(
        v(
          "missing_target_criterion",
          `evaluative question '${questionId}' must name a target criterion`,
        ),
      );
      targetOk = false;
    } else if (isText(target) && !rubricHasCriterion(rubric, target)) {
      violations.push(
        v("unknown_criterion", `question '${questionId}' targets unknown criterion '${target}'`),
      );
      targetOk = false;
    }

    if (textOk && targetOk) {
      parsed.push({
        question_id: questionId as string,
        kind,
        text: text as string,
        target_criterion: isText(target) ? (target as string) : null,
      });
    } else {
      parsed.push(null);
    }
  }

  if (violations.length > 0) return reject(violations);
  return accept({
    schema_version: SCHEMA_VERSION,
    provenance: "generated",
    questions: parsed.filter((q): q is QuestionDoc => q !== null),
  });
}

// -- initial scores ----------------------------------------------------------

interface ScoreRow {
  name: string | null;
  score: number | null;
  justification: string | null;
}

function validateScoreEntry(raw: unknown, base: string, out: ClientViolation[]): ScoreRow {
  if (!isDocument(raw)) {
    out.push(malformed(base, "score object"));
    return { name: null, score: null, justification: null };
  }
  let name: string | null = null;
  const rawName = raw["criterion_name"];
  if (!isText(rawName)) {
    out.push(emptyText(`${base}.criterion_name`));
  } else {
    name = rawName;
  }
  let score: number | null = null;
  const rawScore = raw["score"];
  const label = name ?? base;
  if (!isPlainInteger(rawScore) || rawScore < SCORE_MIN || rawScore > SCORE_MAX) {
    out.push(scoreRange(`scores[${label}]`, rawScore));
  } else {
    score = rawScore;
  }
  let justification: string | null = null;
  const rawJustification = raw["justification"];
  if (!isText(rawJustification)) {
    out.push(emptyText(`${base}.justification`));
  } else {
    justification = rawJustification;
  }
  return { name, score, justification };
}

function checkRubricAlignment(
  names: string[],
  rubric: RubricDoc,
  out: ClientViolation[],
): void {
  const trimmed = names.map((n) => n.trim());
  const rubricNames = rubric.criteria.map((c) => c.criterion_name.trim());
  const duplicates = [...new Set(trimmed.filter((n) => trimmed.filter((x) => x === n).length > 1))];
  for (const name of duplicates.sort()) {
    out.push(v("duplicate_criterion", `criterion name '${name}' appears more than once`));
  }
  const missing = rubricNames.filter((n) => !trimmed.includes(n));
  const extra = trimmed.filter((n) => !rubricNames.includes(n) && !duplicates.includes(n));
  if (missing.length > 0 || extra.length > 0) {
    const parts = [];
    if (missing.length > 0) parts.push("missing criteria: " + missing.map((n) => `'${n}'`).join(", "));
    if (extra.length > 0) parts.push("unknown criteria: " + extra.map((n) => `'${n}'`).join(", "));
    out.push(v("alignment", parts.join("; ")));
  }
}

export function validateInitialScores(
  candidate: unknown,
  rubric: RubricDoc,
): Verdict<InitialAssessmentDoc> {
  const violations: ClientViolation[] = [];
  let rawScores: unknown;
  if (isDocument(candidate)) {
    checkSchemaVersion(candidate, violations);
    rawScores = candidate["scores"];
  } else {
    rawScores = candidate;
  }
  if (!Array.isArray(rawScores)) {
    violations.push(malformed("scores", "array of scores"));
    return reject(violations);
  }

  const rows: ScoreRow[] = [];
  const names: string[] = [];
  for (let i = 0; i < rawScores.length; i++) {
    const row = validateScoreEntry(rawScores[i], `scores[${i}]`, violations);
    if (row.name !== null) names.push(row.name);
    rows.push(row);
  }

  checkRubricAlignment(names, rubric, violations);
  if (violations.length > 0) return reject(violations);

  const byName = new Map<string, CriterionScoreDoc>();
  const vector: Record<string, number> = {};
  for (const row of rows) {
    const entry: CriterionScoreDoc = {
      criterion_name: row.name as string,
      score: row.score as number,
      justification: row.justification as string,
    };
    byName.set(entry.criterion_name.trim(), entry);
    vector[entry.criterion_name] = entry.score;
  }
  const ordered = rubric.criteria.map(
    (c) => byName.get(c.criterion_name.trim()) as CriterionScoreDoc,
  );
  return accept({
    schema_version: SCHEMA_VERSION,
    provenance: "generated",
    scores: ordered,
    weighted_total_tenths: weightedTotalTenths(rubric, vector),
  });
}

// -- reassessment ------------------------------------------------------------

interface ReassessmentRow {
  name: string | null;
  initialScore: unknown;
  finalScore: unknown;
  delta: unknown;
  rationale: string | null;
}

export function validateReassessment(
  candidate: unknown,
  rubric: RubricDoc,
  initial: InitialAssessmentDoc | null = null,
): Verdict<ReassessmentDoc> {
  const violations: ClientViolation[] = [];
  if (!isDocument(candidate)) {
    return reject([malformed(".", "reassessment document object")]);
  }
  checkSchemaVersion(candidate, violations);

  const rawEntries = candidate["entries"];
  if (!Array.isArray(rawEntries)) {
    violations.push(malformed("entries", "array of entries"));
    return reject(violations);
  }

  const finalFeedback = candidate["final_feedback"];
  if (!isText(finalFeedback)) {
    violations.push(emptyText("final_feedback"));
  }

  const rows: ReassessmentRow[] = [];
  const names: string[] = [];
  for (let i = 0; i < rawEntries.length; i++) {
    const raw = rawEntries[i];
    const base = `entries[${i}]`;
    if (!isDocument(raw)) {
      violations.push(malformed(base, "entry object"));
      continue;
    }
    let name: string | null = null;
    const rawName = raw["criterion_name"];
    if (!isText(rawName)) {
      violations.push(emptyText(`${base}.criterion_name`));
    } else {
      name = rawName;
      names.push(name);
    }
    const label = name ?? base;

    let scoresOk = true;
    const initialScore = raw["initial_score"];
    if (!isScoreValue(initialScore)) {
      violations.push(scoreRange(`entries[${label}].initial_score`, initialScore));
      scoresOk = false;
    }
    const finalScore = raw["final_score"];
    if (!isScoreValue(finalScore)) {
      violations.push(scoreRange(`entries[${label}].final_score`, finalScore));
      scoresOk = false;
    }

    const delta = raw["delta"];
    if (scoresOk) {
      if (!isPlainInteger(delta) || delta !== (finalScore as number) - (initialScore as number)) {
        violations.push(
          v(
            "delta_arithmetic",
            `entry for '${label}' claims a delta that is not final minus initial`,
          ),
        );
        scoresOk = false;
      }
    }

    if (scoresOk && initial !== null && name !== null) {
      const key = name.trim();
      const approved = initial.scores.find((s) => s.criterion_name.trim() === key) ?? null;
      if (approved !== null && approved.score !== initialScore) {
        violations.push(
          v(
            "initial_score_mismatch",
            `entry for '${name}' does not echo the approved initial score`,
          ),
        );
      }
    }

    let rationale: string | null = null;
    const rawRationale = raw["rationale"];
    if (!isText(rawRationale)) {
      violations.push(emptyText(`entries[${label}].rationale`));
    } else {
      rationale = rawRationale;
    }

    rows.push({ name, initialScore, finalScore, delta, rationale });
  }

  checkRubricAlignment(names, rubric, violations);
  if (violations.length > 0) return reject(violations);

  const byName = new Map<string, ReassessedCriterionDoc>();
  const vector: Record<string, number> = {};
  for (const row of rows) {
    const entry: ReassessedCriterionDoc = {
      criterion_name: row.name as string,
      initial_score: row.initialScore as number,
      final_score: row.finalScore as number,
      delta: row.delta as number,
      rationale: row.rationale as string,
    };
    byName.set(entry.criterion_name.trim(), entry);
    vector[entry.criterion_name] = entry.final_score;
  }
  const ordered = rubric.criteria.map(
    (c) => byName.get(c.criterion_name.trim()) as ReassessedCriterionDoc,
  );
  return accept({
    schema_version: SCHEMA_VERSION,
    provenance: "generated",
    entries: ordered,
    final_weighted_total_tenths: weightedTotalTenths(rubric, vector),
    final_feedback: finalFeedback as string,
  });
}
