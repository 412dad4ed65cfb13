/** Graph explorer: renders the neighborhood view around a center concept.
 *
 * The SVG mirrors the last GraphView response exactly, node for node and
 * edge for edge; layout is the only client-side addition. Both language
 * variants are fetched together, so the language toggle re-renders from
 * cache without touching the network.
 */

import { ApiClient, ApiError } from "./api.js";
import { h, svg } from "./dom.js";
import { clampDepth, initialExplorerState, type ExplorerState } from "./state.js";
import { localName, type GraphViewPayload, type Lang } from "./types.js";

export interface ExplorerOptions {
  home: string;
  onSelect?: (id: string) => void;
}

const NODE_WIDTH = 150;
const NODE_HEIGHT = 40;
const ROW_HEIGHT = 110;
const CANVAS_WIDTH = 960;

export class Explorer {
  readonly state: ExplorerState;
  private readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly options: ExplorerOptions;
  private readonly knownRoots = new Map<string, string>();

  constructor(root: HTMLElement, api: ApiClient, options: ExplorerOptions) {
    this.root = root;
    this.api = api;
    this.options = options;
    this.state = initialExplorerState(options.home);
  }

  /** Recenter on a concept: one fetch per language plus the breadcrumb. */
  async show(center: string): Promise<void> {
    try {
      const [en, pt, paths] = await Promise.all([
        this.api.neighborhood(center, this.state.depth, "en"),
        this.api.neighborhood(center, this.state.depth, "pt"),
        this.api.paths(center),
      ]);
      this.state.center = center;
      this.state.views = { en, pt };
      this.state.breadcrumb = paths.paths;
      this.harvestRoots(en);
      this.render();
    } catch (err) {
      this.renderError(center, err);
    }
  }

  async reload(): Promise<void> {
    await this.show(this.state.center);
  }

  /** Pure re-render from the cached view for the other language. */
  setLang(lang: Lang): void {
    this.state.lang = lang;
    this.render();
  }

  async setDepth(depth: number): Promise<void> {
    const clamped = clampDepth(depth);
    if (clamped !== this.state.depth) {
      this.state.depth = clamped;
      await this.show(this.state.center);
    }
  }

  select(id: string | null): void {
    this.state.selection = id;
    this.render();
  }

  private harvestRoots(view: GraphViewPayload): void {
    for (const node of view.nodes) {
      if (node.is_root) this.knownRoots.set(node.id, node.label);
    }
  }

  private currentView(): GraphViewPayload | undefined {
    return this.state.views[this.state.lang];
  }

  private render(): void {
    const view = this.currentView();
    if (!view) return;
    this.root.replaceChildren(
      this.renderControls(),
      this.renderBreadcrumb(),
      this.renderGraph(view),
    );
  }

  private renderControls(): HTMLElement {
    const depthInput = h("input", {
      type: "range",
      min: "1",
      max: "4",
      value: String(this.state.depth),
      class: "depth-slider",
      "aria-label": "depth",
    });
    depthInput.addEventListener("change", () => {
      void this.setDepth(Number(depthInput.value));
    });

    const langBox = h("div", { class: "lang-toggle" });
    for (const lang of ["en", "pt"] as const) {
      const button = h(
        "button",
        { class: lang === this.state.lang ? "lang active" : "lang", "data-lang": lang },
        lang,
      );
      button.addEventListener("click", () => this.setLang(lang));
      langBox.append(button);
    }
    return h(
      "div",
      { class: "explorer-controls" },
      h("label", {}, "depth ", depthInput),
      langBox,
    );
  }

  private renderBreadcrumb(): HTMLElement {
    const box = h("nav", { class: "breadcrumb" });
    for (const path of this.state.breadcrumb) {
      const row = h("div", { class: "breadcrumb-path" });
      // Paths arrive leaf-first; breadcrumbs read better root-first.
      const up = [...path].reverse();
      up.forEach((id, i) => {
        if (i > 0) row.append(" / ");
        const crumb = h("button", { class: "crumb", "data-id": id }, localName(id));
        crumb.addEventListener("click", () => void this.show(id));
        row.append(crumb);
      });
      box.append(row);
    }
    return box;
  }

  private renderGraph(view: GraphViewPayload): SVGSVGElement {
    const rows = new Map<number, typeof view.nodes>();
    for (const node of view.nodes) {
      const row = rows.get(node.depth) ?? [];
      row.push(node);
      rows.set(node.depth, row);
    }
    const positions = new Map<string, { x: number; y: number }>();
    for (const [depth, row] of rows) {
      row.forEach((node, i) => {
        positions.set(node.id, {
          x: ((i + 0.5) * CANVAS_WIDTH) / row.length,
          y: 60 + depth * ROW_HEIGHT,
        });
      });
    }
    const height = 120 + Math.max(0, ...rows.keys()) * ROW_HEIGHT;
    const canvas = svg("svg", {
      class: "graph",
      viewBox: `0 0 ${CANVAS_WIDTH} ${height}`,
      role: "img",
    });

    for (const edge of view.edges) {
      const from = positions.get(edge.child);
      const to = positions.get(edge.parent);
      if (!from || !to) continue;
      canvas.append(
        svg("line", {
          class: "edge",
          "data-child": edge.child,
          "data-parent": edge.parent,
          x1: String(from.x),
          y1: String(from.y),
          x2: String(to.x),
          y2: String(to.y),
        }),
      );
    }

    for (const node of view.nodes) {
      const pos = positions.get(node.id);
      if (!pos) continue;
      const classes = ["node"];
      if (node.is_root) classes.push("root");
      if (node.id === this.state.center) classes.push("center");
      if (node.id === this.state.selection) classes.push("selected");
      const group = svg("g", {
        class: classes.join(" "),
        "data-node-id": node.id,
        transform: `translate(${pos.x}, ${pos.y})`,
      });
      group.append(
        svg("rect", {
          x: String(-NODE_WIDTH / 2),
          y: String(-NODE_HEIGHT / 2),
          width: String(NODE_WIDTH),
          height: String(NODE_HEIGHT),
          rx: "8",
        }),
        svg("text", { "text-anchor": "middle", dy: "5" }, node.label),
        svg("title", {}, node.id),
      );
      group.addEventListener("click", () => {
        this.state.selection = node.id;
        this.options.onSelect?.(node.id);
        if (node.id !== this.state.center) {
          void this.show(node.id);
        } else {
          this.render();
        }
      });
      canvas.append(group);
    }
    return canvas;
  }

  private renderError(center: string, err: unknown): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    const panel = h(
      "div",
      { class: "explorer-error", role: "alert" },
      h("p", {}, `Cannot explore ${localName(center)}. ${message}`),
    );
    const links = h("p", { class: "root-links" }, "Back to: ");
    const targets = new Map(this.knownRoots);
    if (!targets.has(this.options.home)) {
      targets.set(this.options.home, localName(this.options.home));
    }
    for (const [id, label] of targets) {
      const link = h("button", { class: "root-link", "data-id": id }, label);
      link.addEventListener("click", () => void this.show(id));
      links.append(link, " ");
    }
    panel.append(links);
    this.root.replaceChildren(panel);
  }
}
