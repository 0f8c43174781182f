/** DOM-equivalent view tree: plain data plus click handlers, so rendering is
 * testable without a browser; toDom() realizes it against a real document. */

import { UiSessionView } from "./session.js";

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: Array<VNode | string>;
  onClick?: () => void;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: Array<VNode | string> = [],
  onClick?: () => void,
): VNode {
  return { tag, attrs, children, onClick };
}

export interface HypothesisHandlers {
  setCaret(position: number): void;
}

/** One clickable cell per character; the validated prefix is marked green and
 * a caret marker sits before the cell the next keystroke corrects. Clicking
 * cell k moves the caret to k; the trailing cell appends at the end. */
export function renderHypothesis(view: UiSessionView, handlers: HypothesisHandlers): VNode {
  const cells: Array<VNode | string> = [];
  const characters = Array.from(view.hypothesis);
  for (let index = 0; index <= characters.length; index += 1) {
    if (view.caret === index && !view.accepted) {
      cells.push(h("span", { class: "caret" }, []));
    }
    if (index === characters.length) {
      cells.push(h("span", { class: "char append", "data-index": String(index) }, [" "],
                   () => handlers.setCaret(index)));
      break;
    }
    const classes = ["char"];
    if (index < view.validatedPrefixChars) classes.push("validated");
    cells.push(h("span", { class: classes.join(" "), "data-index": String(index) },
                 [characters[index]], () => handlers.setCaret(index)));
  }
  return h("div", { class: "hypothesis" }, cells);
}

/** Effort counters, shown exactly as the server reported them. */
export function renderCounters(view: UiSessionView): VNode {
  const rows: Array<[string, string]> = [
    ["keystrokes", String(view.keystrokes)],
    ["mouse actions", String(view.mouseActions)],
    ["last latency", `${view.lastLatencyMs.toFixed(1)} ms`],
  ];
  if (view.ksmr !== null) rows.push(["KSMR", view.ksmr.toFixed(2)]);
  return h("dl", { class: "counters" }, rows.flatMap(([label, value]) => [
    h("dt", {}, [label]),
    h("dd", { "data-counter": label.replace(" ", "-") }, [value]),
  ]));
}

export interface ControlHandlers {
  create(): void;
  accept(): void;
  reset(): void;
}

export function renderControls(view: UiSessionView, handlers: ControlHandlers): VNode {
  const fullyValidated =
    view.hypothesis.length > 0 && view.validatedPrefixChars >= view.hypothesis.length;
  return h("div", { class: "controls" }, [
    h("button", { class: "create" }, ["start"], handlers.create),
    h("button", {
      class: "accept" + (fullyValidated ? " emphasized" : ""),
      ...(view.sessionId === null || view.accepted ? { disabled: "disabled" } : {}),
    }, ["accept"], handlers.accept),
    h("button", {
      class: "reset",
      ...(view.sessionId === null ? { disabled: "disabled" } : {}),
    }, ["reset"], handlers.reset),
  ]);
}

export function renderStatus(view: UiSessionView): VNode {
  const parts: Array<VNode | string> = [];
  if (view.sourceLabel) parts.push(h("span", { class: "source" }, [view.sourceLabel]));
  if (view.busy) parts.push(h("span", { class: "busy" }, ["…"]));
  if (view.error) parts.push(h("span", { class: "error" }, [view.error]));
  if (view.accepted) parts.push(h("span", { class: "accepted" }, ["accepted"]));
  return h("div", { class: "status" }, parts);
}

export function toDom(node: VNode, doc: Document): HTMLElement {
  const element = doc.createElement(node.tag);
  for (const [name, value] of Object.entries(node.attrs)) {
    element.setAttribute(name, value);
  }
  if (node.onClick) {
    element.addEventListener("click", node.onClick);
  }
  for (const child of node.children) {
    if (typeof child === "string") {
      element.appendChild(doc.createTextNode(child));
    } else {
      element.appendChild(toDom(child, doc));
    }
  }
  return element;
}

/** Test helper and crawler: depth-first flatten of a view tree. */
export function walk(node: VNode): VNode[] {
  const out: VNode[] = [node];
  for (const child of node.children) {
    if (typeof child !== "string") out.push(...walk(child));
  }
  return out;
}

export function textOf(node: VNode): string {
  return node.children.map((c) => (typeof c === "string" ? c : textOf(c))).join("");
}
