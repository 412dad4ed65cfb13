/** Typed client for the ontokms HTTP service.
 *
 * Every JSON endpoint answers an envelope: {data} on success or
 * {error: {code, message, detail}} on failure. The client unwraps data and
 * turns error envelopes into ApiError throws. The fetch implementation is
 * injectable so tests can run against a canned transport.
 */

import type {
  ChangeRecordPayload,
  ConceptPayload,
  GraphViewPayload,
  HealthPayload,
  IngestReportPayload,
  Lang,
  QueryResultPayload,
  SearchHitPayload,
  SuggestionsPayload,
  ValidationPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: unknown;

  constructor(code: string, message: string, status: number, detail: unknown = null) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
    this.detail = detail;
  }
}

interface ErrorEnvelope {
  error: { code: string; message: string; detail: unknown };
}

function isErrorEnvelope(body: unknown): body is ErrorEnvelope {
  return typeof body === "object" && body !== null && "error" in body;
}

export interface ConceptDraft {
  id: string;
  parents: string[];
  labels: Record<string, string>;
  comments: Record<string, string>;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => globalThis.fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError("Io", `service unreachable: ${String(err)}`, 0);
    }
    let body: unknown;
    try {
      body = await response.json();
    } catch {
      throw new ApiError("Io", `non-JSON response (${response.status})`, response.status);
    }
    if (isErrorEnvelope(body)) {
      const e = body.error;
      throw new ApiError(e.code, e.message, response.status, e.detail);
    }
    return (body as { data: T }).data;
  }

  private post<T>(path: string, payload: unknown, method = "POST"): Promise<T> {
    return this.request<T>(path, {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<HealthPayload> {
    return this.request("/health");
  }

  getConcept(id: string): Promise<ConceptPayload> {
    return this.request(`/concepts/${encodeURIComponent(id)}`);
  }

  createConcept(draft: ConceptDraft): Promise<ConceptPayload> {
    return this.post("/concepts", draft);
  }

  annotate(
    id: string,
    changes: { labels?: Record<string, string>; comments?: Record<string, string> },
  ): Promise<ConceptPayload> {
    return this.post(`/concepts/${encodeURIComponent(id)}`, changes, "PATCH");
  }

  move(id: string, parents: string[]): Promise<ConceptPayload> {
    return this.post(`/concepts/${encodeURIComponent(id)}`, { parents }, "PATCH");
  }

  rename(id: string, newId: string): Promise<ConceptPayload> {
    return this.post(`/concepts/${encodeURIComponent(id)}`, { id: newId }, "PATCH");
  }

  deleteConcept(id: string, mode = "refuse_if_children"): Promise<{ removed: number }> {
    return this.request(
      `/concepts/${encodeURIComponent(id)}?mode=${encodeURIComponent(mode)}`,
      { method: "DELETE" },
    );
  }

  neighborhood(center: string, depth: number, lang: Lang): Promise<GraphViewPayload> {
    const params = `depth=${depth}&lang=${lang}`;
    return this.request(`/concepts/${encodeURIComponent(center)}/neighborhood?${params}`);
  }

  paths(id: string): Promise<{ paths: string[][] }> {
    return this.request(`/concepts/${encodeURIComponent(id)}/paths`);
  }

  search(q: string, lang?: Lang, k = 10): Promise<{ hits: SearchHitPayload[] }> {
    const params = new URLSearchParams({ q, k: String(k) });
    if (lang) params.set("lang", lang);
    return this.request(`/search?${params.toString()}`);
  }

  suggest(q: string): Promise<{ suggestions: SuggestionsPayload }> {
    return this.request(`/suggest?${new URLSearchParams({ q }).toString()}`);
  }

  query(text: string): Promise<QueryResultPayload> {
    return this.post("/query", { query: text });
  }

  changes(since = 0): Promise<{ changes: ChangeRecordPayload[] }> {
    return this.request(`/changes?since=${since}`);
  }

  validate(): Promise<ValidationPayload> {
    return this.request("/validate");
  }

  importRdf(content: string, source?: string): Promise<{ added: number }> {
    return this.post("/import", { content, source });
  }

  ingest(content: string, format: string, source?: string): Promise<IngestReportPayload> {
    return this.post("/ingest", { content, format, source });
  }
}
