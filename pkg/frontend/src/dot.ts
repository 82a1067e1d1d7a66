/** Parser for the DOT dialect the service emits:
 *
 *   digraph g {
 *     n0 [label="dump"];
 *     n1 [label="entity2", style="filled", fillcolor="gold"];
 *     n0 -> n1 [label="2"];
 *   }
 *
 * Anything it cannot read raises DotError; the caller falls back to the
 * PENMAN text view. */

export class DotError extends Error {}

export interface DotNode {
  id: string;
  label: string;
  filled: boolean;
}

export interface DotEdge {
  from: string;
  to: string;
  label: string;
}

export interface DotGraph {
  nodes: DotNode[];
  edges: DotEdge[];
}

/** Parse `key="value", key="value"` with \" and \\ escapes. */
const parseAttrs = (text: string): Record<string, string> => {
  const attrs: Record<string, string> = {};
  let i = 0;
  while (i < text.length) {
    while (i < text.length && /[\s,]/.test(text[i])) i++;
    if (i >= text.length) break;
    const eq = text.indexOf('=', i);
    if (eq < 0) throw new DotError(`bad attribute list: ${text}`);
    const key = text.slice(i, eq).trim();
    let j = eq + 1;
    while (j < text.length && /\s/.test(text[j])) j++;
    if (text[j] !== '"') throw new DotError(`unquoted attribute value in: ${text}`);
    j++;
    let value = '';
    while (j < text.length && text[j] !== '"') {
      if (text[j] === '\\' && j + 1 < text.length) {
        value += text[j + 1];
        j += 2;
      } else {
        value += text[j];
        j++;
      }
    }
    if (text[j] !== '"') throw new DotError(`unterminated string in: ${text}`);
    attrs[key] = value;
    i = j + 1;
  }
  return attrs;
};

const NODE_STMT = /^(\w+)\s*\[(.*)\]\s*;?$/;
const EDGE_STMT = /^(\w+)\s*->\s*(\w+)\s*\[(.*)\]\s*;?$/;

export const parseDot = (text: string): DotGraph => {
  const lines = text
    .split('\n')
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 2 || !/^digraph\b.*\{$/.test(lines[0]) || lines[lines.length - 1] !== '}') {
    throw new DotError('not a digraph block');
  }
  const nodes: DotNode[] = [];
  const edges: DotEdge[] = [];
  const seen = new Set<string>();
  for (const line of lines.slice(1, -1)) {
    const edge = EDGE_STMT.exec(line);
    if (edge) {
      const attrs = parseAttrs(edge[3]);
      edges.push({ from: edge[1], to: edge[2], label: attrs.label ?? '' });
      continue;
    }
    const node = NODE_STMT.exec(line);
    if (node) {
      const attrs = parseAttrs(node[2]);
      if (seen.has(node[1])) throw new DotError(`duplicate node ${node[1]}`);
      seen.add(node[1]);
      nodes.push({
        id: node[1],
        label: attrs.label ?? node[1],
        filled: (attrs.style ?? '').includes('filled'),
      });
      continue;
    }
    throw new DotError(`unrecognized statement: ${line}`);
  }
  for (const e of edges) {
    if (!seen.has(e.from) || !seen.has(e.to)) {
      throw new DotError(`edge references undeclared node: ${e.from} -> ${e.to}`);
    }
  }
  return { nodes, edges };
};
