/** Wires the three panels together against one ApiClient.
 *
 * The explorer owns navigation, the editor owns mutation, the search panel
 * owns discovery. All coupling happens here through callbacks, so each
 * panel stays testable in isolation.
 */

import { ApiClient } from "./api.js";
import { h } from "./dom.js";
import { ConceptEditor } from "./editor.js";
import { Explorer } from "./explorer.js";
import { SearchPanel } from "./search.js";

export const DEFAULT_CENTER = "GeneralConcept";

export interface App {
  explorer: Explorer;
  editor: ConceptEditor;
  search: SearchPanel;
}

export function mount(app: HTMLElement, api: ApiClient = new ApiClient()): App {
  const searchRoot = h("header", { class: "search-area" });
  const explorerRoot = h("main", { class: "explorer-area" });
  const editorRoot = h("aside", { class: "editor-area" });
  app.replaceChildren(searchRoot, explorerRoot, editorRoot);

  let explorer: Explorer | null = null;
  const editor = new ConceptEditor(editorRoot, api, {
    onSaved: () => void explorer?.reload(),
    onDeleted: () => void explorer?.reload(),
  });
  explorer = new Explorer(explorerRoot, api, {
    home: DEFAULT_CENTER,
    onSelect: (id) => void editor.open(id),
  });
  const search = new SearchPanel(searchRoot, api, {
    onOpenConcept: (id) => {
      void explorer?.show(id);
      void editor.open(id);
    },
  });

  const fromHash = () =>
    window.location.hash ? decodeURIComponent(window.location.hash.slice(1)) : DEFAULT_CENTER;
  window.addEventListener("hashchange", () => void explorer?.show(fromHash()));
  void explorer.show(fromHash());
  return { explorer, editor, search };
}

const appRoot = document.getElementById("app");
if (appRoot) mount(appRoot);
