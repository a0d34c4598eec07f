/**
 * Field-path diffs between artifact documents, in the exact shape the
 * approve endpoints accept.
 *
 * Paths read like `criteria[0].levels[2].desc`. Replace/remove entries
 * carry the expected old value so the server can refuse edits computed
 * against a stale draft. List shrinkage emits removes from the tail
 * downward so entries apply in order without index shifting.
 */

import { EditEntry } from "./types.js";

function isDocument(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function canonicallyEqual(a: unknown, b: unknown): boolean {
  if (Object.is(a, b)) return true;
  if (Array.isArray(a) && Array.isArray(b)) {
    return a.length === b.length && a.every((item, i) => canonicallyEqual(item, b[i]));
  }
  if (isDocument(a) && isDocument(b)) {
    const keysA = Object.keys(a).sort();
    const keysB = Object.keys(b).sort();
    return (
      keysA.length === keysB.length &&
      keysA.every((k, i) => k === keysB[i] && canonicallyEqual(a[k], b[k]))
    );
  }
  return a === b;
}

function join(prefix: string, token: string | number): string {
  if (typeof token === "number") return `${prefix}[${token}]`;
  return prefix ? `${prefix}.${token}` : token;
}

/** Minimal field-path edits turning document `before` into `after`. */
export function computeDiff(before: unknown, after: unknown): EditEntry[] {
  const entries: EditEntry[] = [];
  walk(before, after, "", entries);
  return entries;
}

function walk(before: unknown, after: unknown, prefix: string, out: EditEntry[]): void {
  if (isDocument(before) && isDocument(after)) {
    const keys = [...new Set([...Object.keys(before), ...Object.keys(after)])].sort();
    for (const key of keys) {
      const path = join(prefix, key);
      if (!(key in after)) {
        out.push({ op: "remove", path, old: before[key] });
      } else if (!(key in before)) {
        out.push({ op: "add", path, new: after[key] });
      } else {
        walk(before[key], after[key], path, out);
      }
    }
    return;
  }
  if (Array.isArray(before) && Array.isArray(after)) {
    const shared = Math.min(before.length, after.length);
    for (let i = 0; i < shared; i++) {
      walk(before[i], after[i], join(prefix, i), out);
    }
    for (let i = before.length; i < after.length; i++) {
      out.push({ op: "add", path: join(prefix, i), new: after[i] });
    }
    for (let i = before.length - 1; i > after.length - 1; i--) {
      out.push({ op: "remove", path: join(prefix, i), old: before[i] });
    }
    return;
  }
  if (!canonicallyEqual(before, after)) {
    out.push({ op: "replace", path: prefix || ".", old: before, new: after });
  }
}

/** Deep-copy a JSON document (edit buffers must never alias the snapshot). */
export function cloneDocument<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}
