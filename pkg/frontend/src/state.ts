/** Pure state helpers for the explorer and the editor.
 *
 * The rendered graph must always mirror the last server response, so the
 * explorer state holds the fetched views verbatim, cached per language;
 * switching language re-renders from this cache without another request.
 * Edit buffers are kept apart from the views: typing never touches the graph.
 */

import type { ConceptPayload, GraphViewPayload, Lang } from "./types.js";

export const MIN_DEPTH = 1;
export const MAX_DEPTH = 4;

export interface ExplorerState {
  center: string;
  depth: number;
  lang: Lang;
  selection: string | null;
  views: Partial<Record<Lang, GraphViewPayload>>;
  breadcrumb: string[][];
}

export function initialExplorerState(center: string): ExplorerState {
  return {
    center,
    depth: MIN_DEPTH,
    lang: "en",
    selection: null,
    views: {},
    breadcrumb: [],
  };
}

export function clampDepth(depth: number): number {
  if (!Number.isFinite(depth)) return MIN_DEPTH;
  return Math.min(MAX_DEPTH, Math.max(MIN_DEPTH, Math.trunc(depth)));
}

/** Unsaved form content for one concept. Parents are one id per line. */
export interface EditBuffer {
  labelEn: string;
  labelPt: string;
  commentEn: string;
  commentPt: string;
  parentsText: string;
}

export function bufferFromConcept(concept: ConceptPayload): EditBuffer {
  return {
    labelEn: concept.labels["en"] ?? "",
    labelPt: concept.labels["pt"] ?? "",
    commentEn: concept.comments["en"] ?? "",
    commentPt: concept.comments["pt"] ?? "",
    parentsText: concept.parents.join("\n"),
  };
}

/** Both languages must be present before save is allowed. */
export function canSave(buffer: EditBuffer): boolean {
  return [buffer.labelEn, buffer.labelPt, buffer.commentEn, buffer.commentPt].every(
    (value) => value.trim().length > 0,
  );
}

export function parentsFromText(text: string): string[] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

/** The changed slices of a buffer relative to the loaded concept. */
export function diffBuffer(concept: ConceptPayload, buffer: EditBuffer): {
  annotation: { labels?: Record<string, string>; comments?: Record<string, string> } | null;
  parents: string[] | null;
} {
  const labels = { en: buffer.labelEn.trim(), pt: buffer.labelPt.trim() };
  const comments = { en: buffer.commentEn.trim(), pt: buffer.commentPt.trim() };
  const annotation: { labels?: Record<string, string>; comments?: Record<string, string> } = {};
  if (labels.en !== concept.labels["en"] || labels.pt !== concept.labels["pt"]) {
    annotation.labels = labels;
  }
  if (comments.en !== concept.comments["en"] || comments.pt !== concept.comments["pt"]) {
    annotation.comments = comments;
  }
  const parents = parentsFromText(buffer.parentsText);
  const parentsChanged =
    parents.length !== concept.parents.length ||
    parents.some((p, i) => p !== concept.parents[i]);
  return {
    annotation: annotation.labels || annotation.comments ? annotation : null,
    parents: parentsChanged ? parents : null,
  };
}
