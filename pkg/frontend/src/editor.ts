/** Concept editor: a buffered form over one concept plus a change feed.
 *
 * Edits live in an EditBuffer until save, so typing never changes the
 * explorer graph. Save sends at most one annotate and one move request,
 * derived from the diff against the loaded concept. Rejections (cycle,
 * root protection) render inline with the server's message and fire no
 * callbacks, leaving the rest of the page exactly as it was.
 */

import { ApiClient, ApiError } from "./api.js";
import { h } from "./dom.js";
import {
  bufferFromConcept,
  canSave,
  diffBuffer,
  type EditBuffer,
} from "./state.js";
import { localName, type ChangeRecordPayload, type ConceptPayload } from "./types.js";

export interface EditorOptions {
  onSaved?: (id: string) => void;
  onDeleted?: (id: string) => void;
}

const FEED_LENGTH = 8;

export class ConceptEditor {
  private readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly options: EditorOptions;
  private concept: ConceptPayload | null = null;
  private buffer: EditBuffer | null = null;

  constructor(root: HTMLElement, api: ApiClient, options: EditorOptions = {}) {
    this.root = root;
    this.api = api;
    this.options = options;
    this.root.replaceChildren(h("p", { class: "hint" }, "Select a concept to edit it."));
  }

  async open(id: string): Promise<void> {
    try {
      this.concept = await this.api.getConcept(id);
      this.buffer = bufferFromConcept(this.concept);
      this.render();
      await this.refreshFeed();
    } catch (err) {
      this.root.replaceChildren(this.errorBox(err));
    }
  }

  close(): void {
    this.concept = null;
    this.buffer = null;
    this.root.replaceChildren(h("p", { class: "hint" }, "Select a concept to edit it."));
  }

  private render(): void {
    const concept = this.concept;
    const buffer = this.buffer;
    if (!concept || !buffer) return;

    const title = h("h2", { class: "editor-title" }, localName(concept.id));
    const error = h("div", { class: "editor-error", role: "alert" });

    const fields: Array<[keyof EditBuffer, string, string]> = [
      ["labelEn", "label-en", "Label (en)"],
      ["labelPt", "label-pt", "Label (pt)"],
      ["commentEn", "comment-en", "Comment (en)"],
      ["commentPt", "comment-pt", "Comment (pt)"],
    ];
    const inputs: HTMLElement[] = [];
    const saveButton = h("button", { type: "submit", class: "save" }, "Save");
    const syncSave = () => {
      if (this.buffer && canSave(this.buffer)) {
        saveButton.removeAttribute("disabled");
      } else {
        saveButton.setAttribute("disabled", "");
      }
    };
    for (const [key, cls, labelText] of fields) {
      const input = h("input", { type: "text", class: cls, value: buffer[key] });
      input.addEventListener("input", () => {
        if (this.buffer) this.buffer[key] = input.value;
        syncSave();
      });
      inputs.push(h("label", { class: "field" }, labelText, input));
    }
    const parentsArea = h("textarea", { class: "parents", rows: "3" });
    parentsArea.value = buffer.parentsText;
    parentsArea.addEventListener("input", () => {
      if (this.buffer) this.buffer.parentsText = parentsArea.value;
    });
    syncSave();

    const form = h(
      "form",
      { class: "editor-form" },
      ...inputs,
      h("label", { class: "field" }, "Parents (one per line)", parentsArea),
      saveButton,
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.save(error);
    });

    const modeSelect = h("select", { class: "delete-mode", "aria-label": "delete mode" });
    modeSelect.append(
      h("option", { value: "refuse_if_children" }, "refuse if children"),
      h("option", { value: "reparent_children" }, "reparent children"),
    );
    const deleteButton = h("button", { type: "button", class: "delete" }, "Delete");
    deleteButton.addEventListener("click", () => {
      void this.remove(modeSelect.value, error);
    });

    const feed = h("div", { class: "change-feed" });
    this.root.replaceChildren(
      title,
      error,
      form,
      h("div", { class: "danger" }, modeSelect, deleteButton),
      h("h3", {}, "Recent changes"),
      feed,
    );
  }

  private async save(error: HTMLElement): Promise<void> {
    const concept = this.concept;
    const buffer = this.buffer;
    if (!concept || !buffer || !canSave(buffer)) return;
    const { annotation, parents } = diffBuffer(concept, buffer);
    if (!annotation && !parents) {
      error.replaceChildren(h("p", { class: "hint" }, "Nothing to save."));
      return;
    }
    try {
      if (annotation) await this.api.annotate(concept.id, annotation);
      if (parents) await this.api.move(concept.id, parents);
      error.replaceChildren();
      await this.open(concept.id);
      this.options.onSaved?.(concept.id);
    } catch (err) {
      error.replaceChildren(this.errorBox(err));
    }
  }

  private async remove(mode: string, error: HTMLElement): Promise<void> {
    const concept = this.concept;
    if (!concept) return;
    try {
      await this.api.deleteConcept(concept.id, mode);
      const id = concept.id;
      this.close();
      this.options.onDeleted?.(id);
    } catch (err) {
      error.replaceChildren(this.errorBox(err));
    }
  }

  private async refreshFeed(): Promise<void> {
    const feed = this.root.querySelector(".change-feed");
    if (!feed) return;
    try {
      const { changes } = await this.api.changes();
      const tail = changes.slice(-FEED_LENGTH).reverse();
      feed.replaceChildren(
        ...tail.map((record) => this.feedRow(record)),
      );
    } catch {
      // The feed is informational; a fetch failure should not block editing.
    }
  }

  private feedRow(record: ChangeRecordPayload): HTMLElement {
    return h(
      "div",
      { class: "feed-row", "data-seq": String(record.seq) },
      h("span", { class: "feed-seq" }, `#${record.seq}`),
      h("span", { class: "feed-op" }, record.op),
      h("span", { class: "feed-subject" }, localName(record.subject)),
    );
  }

  private errorBox(err: unknown): HTMLElement {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    return h("p", { class: "error" }, message);
  }
}
