// DOM construction from the latest snapshot. Rendering is a pure function
// of (model document, snapshot, selection, pending flag): no simulation
// logic, no retained widgets; the controller re-renders after every fetch.

import type {
  AdaCurrent,
  AutomatonDoc,
  ModelDoc,
  SdaCurrent,
  Snapshot,
  TransitionRow,
  VerdictDoc,
} from "./api.js";
import { layeredLayout } from "./layout.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// The figures' convention: state-like items red-tinted, message-like green.
const STATE_FILL = "#f4cccc";
const MESSAGE_FILL = "#d9ead3";
const CURRENT_STROKE = "#b00020";

export interface Handlers {
  onSelectAutomaton(id: string): void;
  onFire(action: number): void | Promise<void>;
  onUndo(): void | Promise<void>;
  onReset(): void | Promise<void>;
  onLoadVerdict(verdictId: string): void | Promise<void>;
  onAdvance(): void | Promise<void>;
}

export function h(
  doc: Document,
  tag: string,
  attrs: Record<string, string | boolean> = {},
  ...children: (Node | string)[]
): HTMLElement {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function svgEl(
  doc: Document,
  tag: string,
  attrs: Record<string, string>,
  text?: string,
): Element {
  const node = doc.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

export function currentNodeOf(automaton: AutomatonDoc, snapshot: Snapshot): string {
  if (snapshot.view === "sda3") {
    return (snapshot.current as SdaCurrent).nodes[automaton.id] ?? "";
  }
  const node = (snapshot.current as AdaCurrent).nodes[automaton.id];
  return node === null || node === undefined ? "t" : node;
}

function drawAutomaton(
  doc: Document,
  automaton: AutomatonDoc,
  current: string,
): Element {
  const fill = automaton.kind === "server" ? STATE_FILL : MESSAGE_FILL;
  const layout = layeredLayout(automaton);
  const svg = svgEl(doc, "svg", {
    width: String(layout.width),
    height: String(layout.height),
    class: "graph",
    role: "img",
  });
  const marker = svgEl(doc, "marker", {
    id: `arrow-${automaton.id}`,
    viewBox: "0 0 10 10",
    refX: "9",
    refY: "5",
    markerWidth: "7",
    markerHeight: "7",
    orient: "auto-start-reverse",
  });
  marker.append(svgEl(doc, "path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#444" }));
  const defs = svgEl(doc, "defs", {});
  defs.append(marker);
  svg.append(defs);

  const seenPairs = new Map<string, number>();
  for (const tr of automaton.transitions) {
    const from = layout.pos.get(tr.from);
    const to = layout.pos.get(tr.to);
    if (!from || !to) continue;
    const pairKey = `${tr.from}->${tr.to}`;
    const bend = seenPairs.get(pairKey) ?? 0;
    seenPairs.set(pairKey, bend + 1);
    let labelX: number;
    let labelY: number;
    if (tr.from === tr.to) {
      const d = `M ${from.x} ${from.y - 18} C ${from.x - 34} ${from.y - 58}, ` +
        `${from.x + 34} ${from.y - 58}, ${from.x + 6} ${from.y - 19}`;
      svg.append(svgEl(doc, "path", {
        d,
        fill: "none",
        stroke: "#444",
        "marker-end": `url(#arrow-${automaton.id})`,
      }));
      labelX = from.x;
      labelY = from.y - 52 - bend * 12;
    } else {
      const midX = (from.x + to.x) / 2;
      const midY = (from.y + to.y) / 2 - bend * 16;
      const d = `M ${from.x} ${from.y} Q ${midX} ${midY - 14}, ${to.x} ${to.y}`;
      svg.append(svgEl(doc, "path", {
        d,
        fill: "none",
        stroke: "#444",
        "marker-end": `url(#arrow-${automaton.id})`,
      }));
      labelX = midX;
      labelY = midY - 18;
    }
    svg.append(svgEl(doc, "text", {
      x: String(labelX),
      y: String(labelY),
      "text-anchor": "middle",
      class: "edge-label",
    }, tr.label));
  }

  for (const name of automaton.nodes) {
    const pos = layout.pos.get(name);
    if (!pos) continue;
    const isCurrent = name === current;
    const isInitial = name === automaton.initial;
    const group = svgEl(doc, "g", {
      class: `node${isCurrent ? " current" : ""}`,
      "data-node": name,
    });
    if (isInitial) {
      group.append(svgEl(doc, "ellipse", {
        cx: String(pos.x),
        cy: String(pos.y),
        rx: "56",
        ry: "23",
        fill: "none",
        stroke: "#666",
      }));
    }
    group.append(svgEl(doc, "ellipse", {
      cx: String(pos.x),
      cy: String(pos.y),
      rx: "50",
      ry: "18",
      fill: isCurrent ? fill : "#ffffff",
      stroke: isCurrent ? CURRENT_STROKE : "#666",
      "stroke-width": isCurrent ? "3" : "1.4",
      "stroke-dasharray": name === "t" ? "4 3" : "",
    }));
    group.append(svgEl(doc, "text", {
      x: String(pos.x),
      y: String(pos.y + 4),
      "text-anchor": "middle",
      class: "node-label",
    }, name));
    svg.append(group);
  }
  return svg;
}

function inputChips(doc: Document, items: string[], tint: string): HTMLElement {
  const box = h(doc, "div", { class: "chips" });
  if (items.length === 0) {
    box.append(h(doc, "span", { class: "chip empty" }, "(empty)"));
  }
  for (const item of items) {
    const chip = h(doc, "span", { class: "chip" }, item);
    chip.style.background = tint;
    box.append(chip);
  }
  return box;
}

export function renderAutomatonCard(
  doc: Document,
  automaton: AutomatonDoc,
  snapshot: Snapshot,
  selected: string | null,
  handlers: Handlers,
): HTMLElement {
  const current = currentNodeOf(automaton, snapshot);
  const terminated = snapshot.terminated.includes(automaton.id);
  const card = h(doc, "section", {
    class: `automaton${selected === automaton.id ? " selected" : ""}` +
      `${terminated ? " terminated" : ""}`,
    "data-automaton": automaton.id,
  });
  const title = h(doc, "header", {},
    h(doc, "strong", {}, automaton.id),
    h(doc, "span", { class: "kind" }, ` ${automaton.kind} automaton`),
    terminated ? h(doc, "span", { class: "term-mark" }, " terminated") : "");
  title.addEventListener("click", () => handlers.onSelectAutomaton(automaton.id));
  card.append(title);
  card.append(drawAutomaton(doc, automaton, current));
  if (snapshot.view === "sda3") {
    const pending = (snapshot.current as SdaCurrent).input_sets[automaton.id] ?? [];
    card.append(h(doc, "div", { class: "panel-label" }, "input set"));
    card.append(inputChips(doc, pending, MESSAGE_FILL));
  }
  return card;
}

export function renderVectorPanel(doc: Document, snapshot: Snapshot): HTMLElement {
  const panel = h(doc, "section", { class: "vector-panel" });
  panel.append(h(doc, "div", { class: "panel-label" }, "global input vector"));
  const chips = h(doc, "div", { class: "chips" });
  const vector = (snapshot.current as AdaCurrent).vector;
  for (const [server, value] of Object.entries(vector)) {
    const chip = h(doc, "span", { class: "chip" }, `${server}.${value}`);
    chip.style.background = STATE_FILL;
    chips.append(chip);
  }
  panel.append(chips);
  return panel;
}

export function renderTransitionList(
  doc: Document,
  snapshot: Snapshot,
  selected: string | null,
  pending: boolean,
  handlers: Handlers,
): HTMLElement {
  const box = h(doc, "section", { class: "transitions" });
  const scope = selected === null
    ? snapshot.transitions
    : snapshot.transitions.filter((t) => t.automaton === selected);
  box.append(h(doc, "div", { class: "panel-label" },
    selected === null
      ? "transitions (all automata)"
      : `transitions of ${selected}`));
  const list = h(doc, "ul", { class: "transition-list" });
  for (const tr of scope) {
    list.append(renderTransitionRow(doc, tr, pending, handlers));
  }
  box.append(list);
  return box;
}

function renderTransitionRow(
  doc: Document,
  tr: TransitionRow,
  pending: boolean,
  handlers: Handlers,
): HTMLElement {
  const row = h(doc, "li", { class: tr.enabled ? "enabled" : "disabled" });
  const button = h(doc, "button", {
    class: "fire",
    "data-action": String(tr.action),
    disabled: !tr.enabled || pending,
  }, "fire") as HTMLButtonElement;
  button.addEventListener("click", () => handlers.onFire(tr.action));
  row.append(button);
  row.append(h(doc, "span", { class: "tr-text" },
    ` ${tr.automaton}: ${tr.from} → ${tr.to}  [${tr.label}]`));
  return row;
}

export function renderHistory(
  doc: Document,
  model: ModelDoc,
  snapshot: Snapshot,
): HTMLElement {
  const box = h(doc, "section", { class: "history" });
  box.append(h(doc, "div", { class: "panel-label" },
    `history (${snapshot.history.length} step${snapshot.history.length === 1 ? "" : "s"})`));
  const list = h(doc, "ol", { class: "history-list" });
  for (const aid of snapshot.history) {
    const label = model.actions[aid]?.label ?? `action ${aid}`;
    list.append(h(doc, "li", {}, label));
  }
  box.append(list);
  box.append(h(doc, "div", { class: "config-line" }, snapshot.configuration));
  return box;
}

export function heldDeadlockVerdicts(report: ModelDoc["report"]): VerdictDoc[] {
  return report.verdicts.filter(
    (v) =>
      v.holds &&
      (v.kind === "total-deadlock" ||
        v.kind === "partial-deadlock-agent" ||
        v.kind === "partial-deadlock-server"),
  );
}

export function renderBanner(
  doc: Document,
  model: ModelDoc,
  snapshot: Snapshot,
): HTMLElement | null {
  const anyEnabled = snapshot.transitions.some((t) => t.enabled);
  if (anyEnabled) return null;
  if (snapshot.terminated.length === model.agents.length) {
    return h(doc, "div", { class: "banner termination", role: "status" },
      "Distributed termination: every agent has terminated.");
  }
  const held = heldDeadlockVerdicts(model.report);
  const names = held.map((v) =>
    v.subject === null ? v.kind : `${v.kind}:${v.subject}`);
  const suffix = names.length > 0
    ? ` Verification report: ${names.join(", ")}.`
    : "";
  return h(doc, "div", { class: "banner deadlock", role: "alert" },
    `Deadlock: no transition is enabled and ` +
    `${snapshot.terminated.length === 0 ? "all" : "some"} agents are still waiting.` +
    suffix);
}

export function renderReplayControls(
  doc: Document,
  model: ModelDoc,
  snapshot: Snapshot,
  pending: boolean,
  handlers: Handlers,
): HTMLElement {
  const box = h(doc, "section", { class: "replay" });
  box.append(h(doc, "div", { class: "panel-label" }, "counterexample replay"));
  const witnessed = model.report.verdicts.filter((v) => v.holds && v.witness);
  const select = h(doc, "select", { class: "verdict-select" }) as HTMLSelectElement;
  for (const v of witnessed) {
    const vid = v.subject === null ? v.kind : `${v.kind}:${v.subject}`;
    select.append(h(doc, "option", { value: vid }, vid));
  }
  const load = h(doc, "button", {
    class: "load-trace",
    disabled: pending || witnessed.length === 0,
  }, "load witness") as HTMLButtonElement;
  load.addEventListener("click", () => {
    if (select.value) handlers.onLoadVerdict(select.value);
  });
  const pinned = snapshot.pinned_trace;
  const advance = h(doc, "button", {
    class: "advance",
    disabled: pending || pinned === null || snapshot.cursor >= (pinned?.length ?? 0),
  }, "advance") as HTMLButtonElement;
  advance.addEventListener("click", () => handlers.onAdvance());
  const cursor = h(doc, "span", { class: "cursor" },
    pinned === null ? " no trace pinned"
      : ` step ${snapshot.cursor}/${pinned.length}`);
  box.append(select, load, advance, cursor);
  return box;
}

export function renderSessionControls(
  doc: Document,
  snapshot: Snapshot,
  pending: boolean,
  handlers: Handlers,
): HTMLElement {
  const box = h(doc, "section", { class: "session-controls" });
  const undo = h(doc, "button", {
    class: "undo",
    disabled: pending || snapshot.history.length === 0,
  }, "undo") as HTMLButtonElement;
  undo.addEventListener("click", () => handlers.onUndo());
  const reset = h(doc, "button", { class: "reset", disabled: pending },
    "reset") as HTMLButtonElement;
  reset.addEventListener("click", () => handlers.onReset());
  box.append(undo, reset);
  return box;
}
