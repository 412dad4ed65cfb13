/** Small DOM builders so components stay free of innerHTML string assembly. */

const SVG_NS = "http://www.w3.org/2000/svg";

type Child = Node | string;

function apply(el: Element, attrs: Record<string, string | null>, children: Child[]): void {
  for (const [key, value] of Object.entries(attrs)) {
    if (value !== null) el.setAttribute(key, value);
  }
  for (const child of children) {
    el.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
}

export function h<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | null> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const el = document.createElement(tag);
  apply(el, attrs, children);
  return el;
}

export function svg<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | null> = {},
  ...children: Child[]
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  apply(el, attrs, children);
  return el;
}
