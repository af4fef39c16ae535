// Deterministic layered layout for one automaton graph.
// Layers are BFS depth from the initial node (document order breaks ties);
// nodes unreachable through forward edges go to a trailing layer. Purely
// cosmetic: the semantics always come from the server snapshot.

import type { AutomatonDoc } from "./api.js";

export interface NodePos {
  x: number;
  y: number;
}

export interface Layout {
  layers: string[][];
  pos: Map<string, NodePos>;
  width: number;
  height: number;
}

export const CELL_W = 170;
export const CELL_H = 72;
export const MARGIN = 48;

export function layeredLayout(doc: AutomatonDoc): Layout {
  const forward = new Map<string, string[]>();
  for (const node of doc.nodes) forward.set(node, []);
  for (const tr of doc.transitions) {
    forward.get(tr.from)?.push(tr.to);
  }

  const depth = new Map<string, number>();
  const queue: string[] = [];
  if (doc.nodes.includes(doc.initial)) {
    depth.set(doc.initial, 0);
    queue.push(doc.initial);
  }
  while (queue.length > 0) {
    const node = queue.shift() as string;
    for (const next of forward.get(node) ?? []) {
      if (!depth.has(next)) {
        depth.set(next, (depth.get(node) as number) + 1);
        queue.push(next);
      }
    }
  }

  const reached = doc.nodes.filter((n) => depth.has(n));
  const unreached = doc.nodes.filter((n) => !depth.has(n));
  const maxDepth = reached.reduce((m, n) => Math.max(m, depth.get(n) as number), 0);
  const layers: string[][] = [];
  for (let d = 0; d <= maxDepth; d++) {
    layers.push(reached.filter((n) => depth.get(n) === d));
  }
  if (unreached.length > 0) layers.push(unreached);

  const pos = new Map<string, NodePos>();
  layers.forEach((layer, x) => {
    layer.forEach((node, y) => {
      pos.set(node, { x: MARGIN + x * CELL_W, y: MARGIN + y * CELL_H });
    });
  });
  const tallest = layers.reduce((m, l) => Math.max(m, l.length), 1);
  return {
    layers,
    pos,
    width: MARGIN * 2 + Math.max(layers.length - 1, 0) * CELL_W + 80,
    height: MARGIN * 2 + (tallest - 1) * CELL_H + 30,
  };
}
