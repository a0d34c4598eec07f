/**
 * Exact weighted scoring, mirroring the server's integer arithmetic.
 *
 * A score vector assigns each rubric criterion an integer from 1 to 5; the
 * weighted total lives on a 20-100 point scale and is carried as integer
 * tenths of a point (tenths = 2 * sum(weight_i * score_i) when the weights
 * sum to 100). Everything here is integer math so a client-side preview is
 * always digit-for-digit equal to what the server will store.
 */

import { RubricDoc, SCORE_MAX, SCORE_MIN } from "./types.js";

export function isPlainInteger(value: unknown): value is number {
  return typeof value === "number" && Number.isInteger(value);
}

export function isScoreValue(value: unknown): value is number {
  return isPlainInteger(value) && value >= SCORE_MIN && value <= SCORE_MAX;
}

/** Clamp an attempted score onto the 1-5 scale (steppers stop at the ends). */
export function clampScore(value: number): number {
  if (value < SCORE_MIN) return SCORE_MIN;
  if (value > SCORE_MAX) return SCORE_MAX;
  return Math.round(value);
}

/**
 * Exact weighted total in integer tenths of a point.
 *
 * The vector's keys must biject with the rubric's criteria (names compared
 * after trimming); every score must be an integer in 1..5. Throws on any
 * misalignment — callers wanting a verdict instead of an exception should
 * go through the validators.
 */
export function weightedTotalTenths(
  rubric: RubricDoc,
  vector: Record<string, number>,
): number {
  const trimmed = new Map<string, number>();
  for (const [name, score] of Object.entries(vector)) {
    trimmed.set(name.trim(), score);
  }
  const rubricNames = rubric.criteria.map((c) => c.criterion_name.trim());
  if (trimmed.size !== Object.keys(vector).length) {
    throw new Error("score vector has duplicate criterion names");
  }
  for (const name of rubricNames) {
    if (!trimmed.has(name)) throw new Error(`score vector missing criterion: ${name}`);
  }
  for (const name of trimmed.keys()) {
    if (!rubricNames.includes(name)) throw new Error(`score vector has extra criterion: ${name}`);
  }
  let weighted = 0;
  for (const criterion of rubric.criteria) {
    const score = trimmed.get(criterion.criterion_name.trim());
    if (!isScoreValue(score)) {
      throw new Error(`score out of range for ${criterion.criterion_name}: ${score}`);
    }
    weighted += criterion.weight * score;
  }
  return 2 * weighted;
}

/** Movement between two 1-5 scores, final minus initial. */
export function scoreDelta(initial: number, final: number): number {
  if (!isScoreValue(initial) || !isScoreValue(final)) {
    throw new Error(`scores must be integers in ${SCORE_MIN}..${SCORE_MAX}`);
  }
  return final - initial;
}

/** Render integer tenths as a decimal string, e.g. 710 -> "71.0". */
export function formatTenths(tenths: number): string {
  const sign = tenths < 0 ? "-" : "";
  const magnitude = Math.abs(tenths);
  return `${sign}${Math.floor(magnitude / 10)}.${magnitude % 10}`;
}
