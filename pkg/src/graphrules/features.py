"""Connected-subgraph features and the boolean presence table.

Features are the connected subgraphs of at most n edges of each dataset
graph (single nodes count as connected graphs with 0 edges), deduplicated
across the dataset up to label-preserving isomorphism.
"""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .graphs import Edge, LabeledGraph, penman_root, serialize_penman
from .matching import Pattern, matches

DEFAULT_MAX_EDGES = 2
# Canonicalization is exhaustive over vertex orderings and must stay cheap.
CANONICAL_EDGE_GUARD = 4


class FeatureSizeError(ValueError):
    """Graph exceeds the feature-size bound for canonicalization."""


def enumerate_subgraphs(g: LabeledGraph, n: int) -> list[LabeledGraph]:
    """Every single-node subgraph plus every connected edge-subset subgraph
    of 1..n edges (connectivity ignores direction; node sets are exactly the
    endpoints of the chosen edges). Deterministic order."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = [LabeledGraph({nid: label}) for nid, label in sorted(g.nodes.items())]
    if n == 0 or not g.edges:
        return out
    edges = sorted(g.edges)
    touch: dict[int, list[Edge]] = {}
    for e in edges:
        for endpoint in {e[0], e[1]}:
            touch.setdefault(endpoint, []).append(e)
    adjacent: dict[Edge, set[Edge]] = {e: set() for e in edges}
    for shared in touch.values():
        for e1 in shared:
            adjacent[e1].update(e2 for e2 in shared if e2 != e1)

    seen: set[frozenset[Edge]] = {frozenset([e]) for e in edges}
    stack = list(seen)
    while stack:
        current = stack.pop()
        if len(current) >= n:
            continue
        frontier = set()
        for e in current:
            frontier.update(adjacent[e])
        for e in frontier - current:
            grown = current | {e}
            if grown not in seen:
                seen.add(grown)
                stack.append(grown)

    nodes = g.nodes
    for subset in sorted(seen, key=lambda s: (len(s), sorted(s))):
        members = {v for e in subset for v in (e[0], e[1])}
        out.append(LabeledGraph({v: nodes[v] for v in members}, subset))
    return out


def canonical_form(g: LabeledGraph, max_edges: int = CANONICAL_EDGE_GUARD) -> str:
    """Canonical string: equal iff two graphs are isomorphic with identical
    labels.

    Key = sorted label multisets (cheap bucket) plus the lexicographically
    least edge serialization over all vertex orderings. Only orderings that
    list node labels in sorted order can attain the minimum, so the search
    is the product of per-label-group permutations.
    """
    if g.n_edges > max_edges:
        raise FeatureSizeError(
            f"graph has {g.n_edges} edges, above the canonicalization bound {max_edges}"
        )
    node_labels = tuple(sorted(g.nodes.values()))
    edge_labels = tuple(sorted((g.label(s), l, g.label(t)) for s, t, l in g.edges))
    bucket = repr((node_labels, edge_labels))

    groups: dict[str, list[int]] = {}
    for nid in sorted(g.nodes):
        groups.setdefault(g.label(nid), []).append(nid)
    group_perms = [itertools.permutations(groups[label]) for label in sorted(groups)]
    best: tuple[tuple[int, int, str], ...] | None = None
    for combo in itertools.product(*group_perms):
        index: dict[int, int] = {}
        for ids in combo:
            for nid in ids:
                index[nid] = len(index)
        candidate = tuple(sorted((index[s], index[t], l) for s, t, l in g.edges))
        if best is None or candidate < best:
            best = candidate
    return f"{bucket}#{best!r}"


@dataclass(frozen=True, eq=False)
class FeatureCatalog:
    """Deduplicated feature graphs; `canonical_keys` maps canonical form to
    feature index."""

    features: tuple[LabeledGraph, ...]
    canonical_keys: dict[str, int]

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Boolean presence matrix: presence[i, j] is True iff catalog feature j
    matches row i's graph (literal-label monomorphism)."""

    catalog: FeatureCatalog
    presence: np.ndarray
    row_ids: tuple[int, ...]


def build_feature_table(
    rows: Sequence[tuple[int, LabeledGraph]], n: int = DEFAULT_MAX_EDGES
) -> FeatureTable:
    """Extract, deduplicate, and match features over the given rows.

    Presence is computed with the shared pattern matcher so rule evaluation
    and feature statistics agree by construction; a label-multiset inclusion
    prefilter (a necessary condition for literal patterns) keeps the
    all-pairs matching cheap.
    """
    if not rows:
        raise ValueError("rows must be non-empty")
    if n < 0:
        raise ValueError("n must be non-negative")
    guard = max(n, CANONICAL_EDGE_GUARD)
    features: list[LabeledGraph] = []
    keys: dict[str, int] = {}
    row_ids: list[int] = []
    graphs: list[LabeledGraph] = []
    for row_id, graph in rows:
        row_ids.append(row_id)
        graphs.append(graph)
        for sub in enumerate_subgraphs(graph, n):
            key = canonical_form(sub, guard)
            if key not in keys:
                keys[key] = len(features)
                features.append(sub)

    node_counts = [Counter(graph.nodes.values()) for graph in graphs]
    edge_counts = [Counter(label for _, _, label in graph.edges) for graph in graphs]
    presence = np.zeros((len(graphs), len(features)), dtype=bool)
    for j, feat in enumerate(features):
        pattern = Pattern.literal(feat)
        feat_nodes = Counter(feat.nodes.values())
        feat_edges = Counter(label for _, _, label in feat.edges)
        for i, graph in enumerate(graphs):
            if not (feat_nodes <= node_counts[i] and feat_edges <= edge_counts[i]):
                continue
            if matches(pattern, graph):
                presence[i, j] = True
    return FeatureTable(FeatureCatalog(tuple(features), keys), presence, tuple(row_ids))


def export_catalog(
    table: FeatureTable, labels_by_row: Sequence[Iterable[str]]
) -> list[dict]:
    """Catalog as JSON-ready records: feature PENMAN plus per-class TP/FP
    counts over the table's rows."""
    if len(labels_by_row) != len(table.row_ids):
        raise ValueError("labels_by_row must align with table rows")
    label_sets = [set(labels) for labels in labels_by_row]
    classes = sorted(set().union(*label_sets)) if label_sets else []
    records = []
    for j, feat in enumerate(table.catalog.features):
        column = table.presence[:, j]
        counts = {}
        for cls in classes:
            gold = np.array([cls in labels for labels in label_sets])
            counts[cls] = {
                "tp": int(np.count_nonzero(column & gold)),
                "fp": int(np.count_nonzero(column & ~gold)),
            }
        records.append({"penman": serialize_penman(feat, penman_root(feat)), "counts": counts})
    return records
