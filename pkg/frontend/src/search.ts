/** Search panel: query box, ranked hits, and did-you-mean recovery.
 *
 * An empty query never issues a request. When the service returns no hits,
 * the panel asks /suggest for near-miss tokens and offers them as one-click
 * replacements. Transport failures surface as a toast with a retry button.
 */

import { ApiClient, ApiError } from "./api.js";
import { h } from "./dom.js";
import { localName, type Lang, type SearchHitPayload } from "./types.js";

export interface SearchOptions {
  onOpenConcept?: (id: string) => void;
}

export class SearchPanel {
  private readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly options: SearchOptions;
  private readonly input: HTMLInputElement;
  private readonly langSelect: HTMLSelectElement;
  private readonly results: HTMLElement;
  private lastQuery = "";

  constructor(root: HTMLElement, api: ApiClient, options: SearchOptions = {}) {
    this.root = root;
    this.api = api;
    this.options = options;
    this.input = h("input", {
      type: "search",
      class: "search-input",
      placeholder: "search labels, comments, records",
      "aria-label": "search",
    });
    this.langSelect = h("select", { class: "search-lang", "aria-label": "language filter" });
    for (const [value, text] of [["", "all"], ["en", "en"], ["pt", "pt"]]) {
      this.langSelect.append(h("option", { value: value ?? "" }, text ?? ""));
    }
    const button = h("button", { type: "submit", class: "search-go" }, "Search");
    const form = h("form", { class: "search-form" }, this.input, this.langSelect, button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.run(this.input.value);
    });
    this.results = h("div", { class: "search-results" });
    this.root.replaceChildren(form, this.results);
  }

  async run(query: string): Promise<void> {
    const trimmed = query.trim();
    this.input.value = query;
    if (!trimmed) {
      this.results.replaceChildren(
        h("p", { class: "hint" }, "Type a few words to search the knowledge base."),
      );
      return;
    }
    this.lastQuery = trimmed;
    const lang = (this.langSelect.value || undefined) as Lang | undefined;
    try {
      const { hits } = await this.api.search(trimmed, lang);
      if (hits.length === 0) {
        await this.renderSuggestions(trimmed);
      } else {
        this.renderHits(hits);
      }
    } catch (err) {
      this.renderToast(err);
    }
  }

  private renderHits(hits: SearchHitPayload[]): void {
    const list = h("ul", { class: "hits" });
    for (const hit of hits) {
      const item = h("li", { class: "hit" });
      const owner = hit.doc.owner;
      if (hit.doc.kind === "Record") {
        item.append(h("span", { class: "hit-owner" }, owner));
      } else {
        const open = h(
          "button",
          { class: "hit-owner concept", "data-owner": owner },
          localName(owner),
        );
        open.addEventListener("click", () => this.options.onOpenConcept?.(owner));
        item.append(open);
      }
      item.append(
        h("span", { class: "hit-kind" }, hit.doc.kind),
        h("span", { class: "hit-lang" }, hit.doc.lang ?? "-"),
        h("span", { class: "hit-score" }, hit.score.toFixed(3)),
        h("p", { class: "hit-snippet" }, hit.snippet),
      );
      list.append(item);
    }
    this.results.replaceChildren(list);
  }

  private async renderSuggestions(query: string): Promise<void> {
    const box = h("div", { class: "no-results" }, h("p", {}, "No results."));
    try {
      const { suggestions } = await this.api.suggest(query);
      for (const [token, candidates] of Object.entries(suggestions)) {
        if (candidates.length === 0) continue;
        const row = h("p", { class: "did-you-mean" }, `Did you mean (for "${token}"): `);
        for (const candidate of candidates) {
          const pick = h(
            "button",
            { class: "suggestion", "data-token": candidate.token },
            candidate.token,
          );
          pick.addEventListener("click", () => {
            const replaced = query
              .split(/\s+/)
              .map((word) => (word.toLowerCase() === token ? candidate.token : word))
              .join(" ");
            void this.run(replaced);
          });
          row.append(pick, " ");
        }
        box.append(row);
      }
    } catch {
      // Suggestions are best-effort; "No results." alone is still correct.
    }
    this.results.replaceChildren(box);
  }

  private renderToast(err: unknown): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    const retry = h("button", { class: "retry" }, "Retry");
    retry.addEventListener("click", () => void this.run(this.lastQuery));
    this.results.replaceChildren(
      h("div", { class: "toast", role: "alert" }, h("span", {}, `Search failed. ${message} `), retry),
    );
  }
}
