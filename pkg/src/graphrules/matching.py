"""Regex-labeled pattern graphs and VF2-style subgraph matching.

A pattern matches a graph when there is an injective node mapping under
which every pattern edge has a same-direction counterpart between the
mapped nodes and every label regex fully matches the corresponding string
label (subgraph monomorphism: extra edges in the graph are fine).
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping

from .graphs import Edge, LabeledGraph, parse_penman_parts, penman_root, serialize_penman

# Characters that make a label behave as more than a literal string under
# regex matching. Deliberately excludes '-' and similar, which are literal
# outside character classes.
_REGEX_METACHARS = set(".^$*+?{}[]()|\\")

MatchMapping = dict[int, int]  # pattern node id -> graph node id


class PatternError(ValueError):
    """Invalid pattern structure or label regex."""


def is_regex_label(label: str) -> bool:
    """True when the label contains regex metacharacters (non-literal)."""
    return any(c in _REGEX_METACHARS for c in label)


class Pattern:
    """Graph whose node and edge labels are anchored regexes.

    A plain string label behaves as literal equality (full-match semantics:
    "into" does not match "into_the"). Patterns must be connected ignoring
    edge direction and contain at least one node. Labels keep the case they
    were written with; graph labels are lowercased at ingestion, so
    uppercase literals simply never match.
    """

    __slots__ = ("_nodes", "_edges", "_regex", "_plan")

    def __init__(self, nodes: Mapping[int, str], edges: Iterable[Edge] = ()):
        self._nodes = {int(k): v for k, v in nodes.items()}
        if not self._nodes:
            raise PatternError("pattern must have at least one node")
        self._edges = frozenset((s, t, l) for s, t, l in edges)
        for nid, label in self._nodes.items():
            if not label:
                raise PatternError(f"pattern node {nid} has an empty label")
        for src, tgt, label in self._edges:
            if src not in self._nodes or tgt not in self._nodes:
                raise PatternError(f"pattern edge ({src}, {tgt}, {label!r}) references a missing node")
            if not label:
                raise PatternError(f"pattern edge ({src}, {tgt}) has an empty label")
        self._regex = {}
        for label in set(self._nodes.values()) | {l for _, _, l in self._edges}:
            try:
                self._regex[label] = re.compile(label)
            except re.error as exc:
                raise PatternError(f"bad label regex {label!r}: {exc}") from exc
        if not self._connected():
            raise PatternError("pattern must be connected (ignoring edge direction)")
        self._plan = self._build_plan()

    def _connected(self) -> bool:
        nodes = set(self._nodes)
        adj: dict[int, set[int]] = {n: set() for n in nodes}
        for s, t, _ in self._edges:
            adj[s].add(t)
            adj[t].add(s)
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == nodes

    def _build_plan(self) -> list[tuple[int, Edge | None, list[Edge]]]:
        """Static matching order: (node, anchor edge to a placed node, edges
        checked once this node is placed). Highest-degree nodes go first for
        pruning; ties break on node id."""
        degree = {n: 0 for n in self._nodes}
        for s, t, _ in self._edges:
            degree[s] += 1
            degree[t] += 1
        order: list[int] = []
        placed: set[int] = set()
        plan: list[tuple[int, Edge | None, list[Edge]]] = []
        remaining = set(self._nodes)
        while remaining:
            frontier = {
                n for n in remaining
                if any(s in placed or t in placed for s, t, _ in self._edges if n in (s, t))
            }
            pool = frontier or remaining  # empty frontier only on the first step
            nxt = min(pool, key=lambda n: (-degree[n], n))
            anchor = None
            checks: list[Edge] = []
            for e in sorted(self._edges):
                s, t, _ = e
                if nxt in (s, t) and (s in placed or t in placed or s == t == nxt):
                    checks.append(e)
                    other = t if s == nxt else s
                    if anchor is None and other in placed:
                        anchor = e
            plan.append((nxt, anchor, checks))
            placed.add(nxt)
            order.append(nxt)
            remaining.discard(nxt)
        return plan

    @property
    def nodes(self) -> dict[int, str]:
        return dict(self._nodes)

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    def label(self, node: int) -> str:
        return self._nodes[node]

    def regex_nodes(self) -> list[int]:
        """Node ids whose labels are non-literal, sorted."""
        return sorted(n for n, l in self._nodes.items() if is_regex_label(l))

    @classmethod
    def literal(cls, graph: LabeledGraph) -> "Pattern":
        """Pattern matching exactly the given graph's labels (regex-escaped)."""
        nodes = {n: re.escape(l) for n, l in graph.nodes.items()}
        edges = {(s, t, re.escape(l)) for s, t, l in graph.edges}
        return cls(nodes, edges)

    @classmethod
    def from_penman(cls, text: str) -> "Pattern":
        """Parse a PENMAN string whose concepts/roles are label regexes."""
        nodes, edges, _root = parse_penman_parts(text)
        return cls(nodes, edges)

    def to_penman(self) -> str:
        """Deterministic PENMAN form (regex labels appear as concept/role text)."""
        return serialize_penman(self, penman_root(self))

    def with_node_label(self, node: int, label: str) -> "Pattern":
        if node not in self._nodes:
            raise PatternError(f"pattern has no node {node}")
        nodes = dict(self._nodes)
        nodes[node] = label
        return Pattern(nodes, self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((frozenset(self._nodes.items()), self._edges))

    def __repr__(self) -> str:
        return f"Pattern(nodes={self._nodes!r}, edges={sorted(self._edges)!r})"


def _edge_ok(pattern: Pattern, graph: LabeledGraph, e: Edge, mapping: MatchMapping) -> bool:
    src, tgt, label = e
    regex = pattern._regex[label]
    gsrc, gtgt = mapping[src], mapping[tgt]
    for _, gt, glabel in graph.out_edges(gsrc):
        if gt == gtgt and regex.fullmatch(glabel):
            return True
    return False


def find_mappings(
    pattern: Pattern, graph: LabeledGraph, limit: int | None = None
) -> list[MatchMapping]:
    """Enumerate distinct injective node mappings of `pattern` into `graph`,
    up to `limit` (None = unbounded). Deterministic order: backtracking with
    candidates visited in ascending graph-node-id order."""
    if limit is not None and limit <= 0:
        raise ValueError("limit must be positive or None")
    results: list[MatchMapping] = []
    plan = pattern._plan
    mapping: MatchMapping = {}
    used: set[int] = set()
    all_nodes = graph.node_ids

    def candidates(step: int) -> Iterable[int]:
        pnode, anchor, _checks = plan[step]
        if anchor is None:
            return all_nodes
        asrc, atgt, _ = anchor
        if asrc == pnode:  # anchored via incoming side: pnode -> placed
            gother = mapping[atgt]
            cands = {s for s, _, _ in graph.in_edges(gother)}
        else:  # placed -> pnode
            gother = mapping[asrc]
            cands = {t for _, t, _ in graph.out_edges(gother)}
        return sorted(cands)

    def extend(step: int) -> bool:
        if step == len(plan):
            results.append(dict(mapping))
            return limit is not None and len(results) >= limit
        pnode, _anchor, checks = plan[step]
        node_regex = pattern._regex[pattern._nodes[pnode]]
        for gnode in candidates(step):
            if gnode in used:
                continue
            if not node_regex.fullmatch(graph.label(gnode)):
                continue
            mapping[pnode] = gnode
            if all(_edge_ok(pattern, graph, e, mapping) for e in checks):
                used.add(gnode)
                done = extend(step + 1)
                used.discard(gnode)
                if done:
                    del mapping[pnode]
                    return True
            del mapping[pnode]
        return False

    extend(0)
    return results


def matches(pattern: Pattern, graph: LabeledGraph) -> bool:
    """True iff at least one match mapping exists."""
    return bool(find_mappings(pattern, graph, limit=1))
