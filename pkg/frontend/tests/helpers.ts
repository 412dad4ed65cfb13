/** Canned transport and payload fixtures shared by the suites.
 *
 * fakeFetch records every call and routes it through a handler that
 * returns envelope bodies, so each test declares exactly the service
 * behavior it needs and can assert on the traffic afterwards.
 */

import type { FetchLike } from "../src/api.js";
import type {
  ChangeRecordPayload,
  ConceptPayload,
  GraphViewPayload,
  Lang,
  SearchHitPayload,
} from "../src/types.js";

export const BASE = "http://epilepsiae.example.org/onto#";

export function iri(local: string): string {
  return BASE + local;
}

export function conceptPath(id: string, suffix = ""): string {
  return `/concepts/${encodeURIComponent(id)}${suffix}`;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export interface Reply {
  status?: number;
  body: unknown;
}

export type Handler = (call: RecordedCall) => Reply | undefined;

function jsonResponse(body: unknown, status: number): Response {
  return {
    status,
    json: async () => body,
  } as unknown as Response;
}

export function fakeFetch(handler: Handler): { fetch: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetch: FetchLike = async (url, init) => {
    const call: RecordedCall = {
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : null,
    };
    calls.push(call);
    const reply = handler(call);
    if (!reply) {
      return jsonResponse(
        { error: { code: "NotFound", message: `no handler for ${call.method} ${url}`, detail: null } },
        404,
      );
    }
    return jsonResponse(reply.body, reply.status ?? 200);
  };
  return { fetch, calls };
}

export function ok(data: unknown): Reply {
  return { status: 200, body: { data } };
}

export function fail(status: number, code: string, message: string, detail: unknown = null): Reply {
  return { status, body: { error: { code, message, detail } } };
}

/** Ball of radius 1 around Epilepsy: one root parent, two children. */
export function graphViewFixture(lang: Lang): GraphViewPayload {
  const pick = (en: string, pt: string) => (lang === "en" ? en : pt);
  return {
    center: iri("Epilepsy"),
    nodes: [
      { id: iri("Epilepsy"), label: pick("Epilepsy", "Epilepsia"), is_root: false, depth: 0 },
      {
        id: iri("GeneralConcept"),
        label: pick("General concepts", "Conceitos gerais"),
        is_root: true,
        depth: 1,
      },
      {
        id: iri("FocalEpilepsy"),
        label: pick("Focal epilepsy", "Epilepsia focal"),
        is_root: false,
        depth: 1,
      },
      {
        id: iri("SleepDisorder"),
        label: pick("Sleep disorder", "Disturbio do sono"),
        is_root: false,
        depth: 1,
      },
    ],
    edges: [
      { child: iri("Epilepsy"), parent: iri("GeneralConcept") },
      { child: iri("FocalEpilepsy"), parent: iri("Epilepsy") },
      { child: iri("SleepDisorder"), parent: iri("Epilepsy") },
    ],
  };
}

export function pathsFixture(): { paths: string[][] } {
  return { paths: [[iri("Epilepsy"), iri("GeneralConcept")]] };
}

export function conceptFixture(): ConceptPayload {
  return {
    id: iri("Epilepsy"),
    parents: [iri("GeneralConcept")],
    labels: { en: "Epilepsy", pt: "Epilepsia" },
    comments: { en: "A neurological disorder.", pt: "Um disturbio neurologico." },
  };
}

export function changesFixture(count: number): { changes: ChangeRecordPayload[] } {
  const changes: ChangeRecordPayload[] = [];
  for (let seq = 1; seq <= count; seq++) {
    changes.push({
      seq,
      timestamp: "2026-08-16T12:00:00+00:00",
      op: seq === 1 ? "Import" : "Annotate",
      subject: iri("Epilepsy"),
      detail: {},
    });
  }
  return { changes };
}

export function hitFixture(overrides: Partial<SearchHitPayload> = {}): SearchHitPayload {
  return {
    doc: { kind: "ConceptLabel", owner: iri("Epilepsy"), lang: "en" },
    score: 1.25,
    snippet: "Epilepsy",
    ...overrides,
  };
}

/** Handler for the explorer round: neighborhood + paths for the fixture. */
export function explorerHandler(call: RecordedCall): Reply | undefined {
  if (call.url.includes("/neighborhood")) {
    const lang: Lang = call.url.includes("lang=pt") ? "pt" : "en";
    return ok(graphViewFixture(lang));
  }
  if (call.url.includes("/paths")) {
    return ok(pathsFixture());
  }
  return undefined;
}

/** Lets queued promise chains (fetch, render) run to completion. */
export async function settle(): Promise<void> {
  for (let i = 0; i < 6; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function nodeIds(root: HTMLElement): string[] {
  return [...root.querySelectorAll("[data-node-id]")].map(
    (el) => el.getAttribute("data-node-id") ?? "",
  );
}

export function nodeLabels(root: HTMLElement): Map<string, string> {
  const out = new Map<string, string>();
  for (const el of root.querySelectorAll("[data-node-id]")) {
    out.set(el.getAttribute("data-node-id") ?? "", el.querySelector("text")?.textContent ?? "");
  }
  return out;
}

export function edgePairs(root: HTMLElement): Array<[string, string]> {
  return [...root.querySelectorAll("line.edge")].map((el) => [
    el.getAttribute("data-child") ?? "",
    el.getAttribute("data-parent") ?? "",
  ]);
}

export function click(el: Element): void {
  el.dispatchEvent(new window.Event("click", { bubbles: true, cancelable: true }));
}

export function setInput(el: HTMLInputElement | HTMLTextAreaElement, value: string): void {
  el.value = value;
  el.dispatchEvent(new window.Event("input", { bubbles: true }));
}

export function submit(form: HTMLFormElement): void {
  form.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));
}
