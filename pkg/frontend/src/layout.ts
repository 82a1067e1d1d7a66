/** Layered top-down layout for small directed graphs. Good enough for
 * sentence-sized graphs; no crossing minimization beyond a single
 * barycenter pass. Cycles are fine (BFS ranking, back edges drawn curved). */

import type { DotGraph } from './dot.js';

export interface PlacedNode {
  id: string;
  label: string;
  filled: boolean;
  x: number; // center
  y: number; // center
  w: number;
  h: number;
}

export interface PlacedEdge {
  from: string;
  to: string;
  label: string;
  path: string; // SVG path data
  lx: number; // label anchor
  ly: number;
}

export interface Layout {
  width: number;
  height: number;
  nodes: PlacedNode[];
  edges: PlacedEdge[];
}

const NODE_H = 34;
const CHAR_W = 8.5;
const MIN_W = 50;
const H_GAP = 30;
const V_GAP = 70;
const PAD = 24;

const nodeWidth = (label: string) => Math.max(MIN_W, label.length * CHAR_W + 22);

/** BFS ranks from in-degree-0 sources (or the first node of a cycle). */
const rankNodes = (g: DotGraph): Map<string, number> => {
  const indeg = new Map<string, number>(g.nodes.map((n) => [n.id, 0]));
  for (const e of g.edges) {
    if (e.from !== e.to) indeg.set(e.to, (indeg.get(e.to) ?? 0) + 1);
  }
  const out = new Map<string, string[]>();
  for (const e of g.edges) {
    if (!out.has(e.from)) out.set(e.from, []);
    out.get(e.from)!.push(e.to);
  }
  const rank = new Map<string, number>();
  const queue: string[] = [];
  for (const n of g.nodes) {
    if ((indeg.get(n.id) ?? 0) === 0) {
      rank.set(n.id, 0);
      queue.push(n.id);
    }
  }
  let cursor = 0;
  const visit = () => {
    while (cursor < queue.length) {
      const id = queue[cursor++];
      for (const next of out.get(id) ?? []) {
        if (!rank.has(next)) {
          rank.set(next, rank.get(id)! + 1);
          queue.push(next);
        }
      }
    }
  };
  visit();
  // a pure cycle has no in-degree-0 source; seed from any unranked node
  for (const n of g.nodes) {
    if (!rank.has(n.id)) {
      rank.set(n.id, 0);
      queue.push(n.id);
      visit();
    }
  }
  return rank;
};

export const layoutGraph = (g: DotGraph): Layout => {
  const rank = rankNodes(g);
  const layers = new Map<number, string[]>();
  for (const n of g.nodes) {
    const r = rank.get(n.id)!;
    if (!layers.has(r)) layers.set(r, []);
    layers.get(r)!.push(n.id);
  }

  // one barycenter pass: order each layer by mean parent position
  const position = new Map<string, number>();
  const parents = new Map<string, string[]>();
  for (const e of g.edges) {
    if (!parents.has(e.to)) parents.set(e.to, []);
    parents.get(e.to)!.push(e.from);
  }
  const ranksSorted = [...layers.keys()].sort((a, b) => a - b);
  for (const r of ranksSorted) {
    const ids = layers.get(r)!;
    if (r !== ranksSorted[0]) {
      ids.sort((a, b) => {
        const mean = (id: string) => {
          const ps = (parents.get(id) ?? []).filter((p) => position.has(p));
          if (ps.length === 0) return 0;
          return ps.reduce((s, p) => s + position.get(p)!, 0) / ps.length;
        };
        return mean(a) - mean(b) || a.localeCompare(b);
      });
    }
    ids.forEach((id, i) => position.set(id, i));
  }

  const byId = new Map(g.nodes.map((n) => [n.id, n]));
  const placed = new Map<string, PlacedNode>();
  let width = 0;
  for (const r of ranksSorted) {
    let x = PAD;
    for (const id of layers.get(r)!) {
      const node = byId.get(id)!;
      const w = nodeWidth(node.label);
      placed.set(id, {
        id,
        label: node.label,
        filled: node.filled,
        x: x + w / 2,
        y: PAD + r * (NODE_H + V_GAP) + NODE_H / 2,
        w,
        h: NODE_H,
      });
      x += w + H_GAP;
    }
    width = Math.max(width, x - H_GAP + PAD);
  }
  const height = PAD * 2 + ranksSorted.length * NODE_H + (ranksSorted.length - 1) * V_GAP;

  const edges: PlacedEdge[] = g.edges.map((e) => {
    const a = placed.get(e.from)!;
    const b = placed.get(e.to)!;
    if (e.from === e.to) {
      // self loop on the right edge of the node
      const x = a.x + a.w / 2;
      const y = a.y;
      return {
        ...e,
        path: `M ${x} ${y - 8} C ${x + 36} ${y - 22}, ${x + 36} ${y + 22}, ${x} ${y + 8}`,
        lx: x + 40,
        ly: y,
      };
    }
    const downward = b.y > a.y;
    const x1 = a.x;
    const y1 = downward ? a.y + a.h / 2 : a.y - a.h / 2;
    const x2 = b.x;
    const y2 = downward ? b.y - b.h / 2 : b.y + b.h / 2;
    if (Math.abs(y1 - y2) < 1) {
      // same layer: arc over the nodes
      const mid = (x1 + x2) / 2;
      const lift = a.y - a.h / 2 - 26;
      return {
        ...e,
        path: `M ${x1} ${a.y - a.h / 2} Q ${mid} ${lift}, ${x2} ${b.y - b.h / 2}`,
        lx: mid,
        ly: lift + 2,
      };
    }
    const my = (y1 + y2) / 2;
    return {
      ...e,
      path: `M ${x1} ${y1} C ${x1} ${my}, ${x2} ${my}, ${x2} ${y2}`,
      lx: (x1 + x2) / 2 + 6,
      ly: my,
    };
  });

  return { width: Math.max(width, 160), height, nodes: [...placed.values()], edges };
};
