/** Payload shapes as the service emits them. Field names match the JSON. */

export type Lang = "en" | "pt";

export interface GraphNodePayload {
  id: string;
  label: string;
  is_root: boolean;
  depth: number;
}

export interface GraphEdgePayload {
  child: string;
  parent: string;
}

export interface GraphViewPayload {
  center: string;
  nodes: GraphNodePayload[];
  edges: GraphEdgePayload[];
}

export interface ConceptPayload {
  id: string;
  parents: string[];
  labels: Record<string, string>;
  comments: Record<string, string>;
}

export interface DocRefPayload {
  kind: string;
  owner: string;
  lang: string | null;
}

export interface SearchHitPayload {
  doc: DocRefPayload;
  score: number;
  snippet: string;
}

export interface SuggestionCandidate {
  token: string;
  distance: number;
}

/** Keyed by the unknown query token. */
export type SuggestionsPayload = Record<string, SuggestionCandidate[]>;

export interface ChangeRecordPayload {
  seq: number;
  timestamp: string;
  op: string;
  subject: string;
  detail: Record<string, unknown>;
}

export interface ViolationPayload {
  kind: string;
  subject: string;
  message: string;
}

export interface ValidationPayload {
  concepts: number;
  labels: number;
  comments: number;
  violations: ViolationPayload[];
}

export interface QueryResultPayload {
  columns: string[];
  rows: string[][];
}

export interface IngestReportPayload {
  accepted: number;
  rejected: number;
  reasons: string[];
}

export interface HealthPayload {
  status: string;
  concepts: number;
}

/** The trailing path segment of an IRI, for compact display. */
export function localName(iri: string): string {
  const afterHash = iri.split("#").pop() ?? iri;
  return afterHash.split("/").pop() ?? afterHash;
}
