"""Shared test oracles and random generators.

The oracles are deliberately naive reimplementations (exhaustive search,
pairwise checks) used to validate the real algorithms.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from random import Random

from graphrules import LabeledGraph, Pattern


def brute_force_mappings(pattern: Pattern, graph: LabeledGraph) -> list[dict[int, int]]:
    """All injective pattern→graph node assignments satisfying every node
    and edge regex, by exhaustive enumeration."""
    pnodes = sorted(pattern.nodes)
    gnodes = sorted(graph.nodes)
    found = []
    for combo in itertools.permutations(gnodes, len(pnodes)):
        assignment = dict(zip(pnodes, combo))
        if all(
            re.fullmatch(pattern.label(p), graph.label(assignment[p])) for p in pnodes
        ) and all(
            any(
                src == assignment[ps] and tgt == assignment[pt] and re.fullmatch(rlabel, label)
                for src, tgt, label in graph.edges
            )
            for ps, pt, rlabel in pattern.edges
        ):
            found.append(assignment)
    return found


def brute_force_matches(pattern: Pattern, graph: LabeledGraph) -> bool:
    return bool(brute_force_mappings(pattern, graph))


def are_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    """Label-preserving isomorphism by exhaustive bijection search."""
    if sorted(g1.nodes.values()) != sorted(g2.nodes.values()):
        return False
    if g1.n_edges != g2.n_edges:
        return False
    groups1: dict[str, list[int]] = {}
    for nid in sorted(g1.nodes):
        groups1.setdefault(g1.label(nid), []).append(nid)
    groups2: dict[str, list[int]] = {}
    for nid in sorted(g2.nodes):
        groups2.setdefault(g2.label(nid), []).append(nid)
    per_label = [
        (groups1[label], groups2[label]) for label in sorted(groups1)
    ]
    for combo in itertools.product(
        *(itertools.permutations(ids2) for _, ids2 in per_label)
    ):
        mapping = {}
        for (ids1, _), permuted in zip(per_label, combo):
            mapping.update(zip(ids1, permuted))
        if {(mapping[s], mapping[t], l) for s, t, l in g1.edges} == set(g2.edges):
            return True
    return False


def connected_edge_subsets(graph: LabeledGraph, n: int) -> set[frozenset]:
    """Every connected (direction-ignored) subset of 1..n edges."""
    result = set()
    edges = sorted(graph.edges)
    for size in range(1, n + 1):
        for combo in itertools.combinations(edges, size):
            if _subset_connected(combo):
                result.add(frozenset(combo))
    return result


def _subset_connected(edges) -> bool:
    nodes = {v for e in edges for v in (e[0], e[1])}
    reached = {next(iter(nodes))}
    frontier = True
    while frontier:
        frontier = False
        for s, t, _ in edges:
            if (s in reached) != (t in reached):
                reached.update((s, t))
                frontier = True
    return reached == nodes


LABEL_POOL = ["a", "b", "c", "x", "y", "into", "entity1", "entity2"]
EDGE_POOL = ["1", "2", "r", "s", "nsubj"]


def random_graph(
    rng: Random,
    max_nodes: int = 6,
    max_edges: int = 10,
    connected: bool = False,
    labels: list[str] = LABEL_POOL,
    edge_labels: list[str] = EDGE_POOL,
) -> LabeledGraph:
    n = rng.randint(1, max_nodes)
    nodes = {i: rng.choice(labels) for i in range(n)}
    edges = set()
    if connected:
        # random spanning tree with random orientations
        for i in range(1, n):
            other = rng.randrange(i)
            label = rng.choice(edge_labels)
            edges.add((i, other, label) if rng.random() < 0.5 else (other, i, label))
    extra = rng.randint(0, max(0, max_edges - len(edges)))
    for _ in range(extra):
        s, t = rng.randrange(n), rng.randrange(n)
        edges.add((s, t, rng.choice(edge_labels)))
    return LabeledGraph(nodes, edges)


def random_pattern(
    rng: Random,
    graph: LabeledGraph,
    max_edges: int = 3,
) -> Pattern:
    """Small connected pattern with labels drawn mostly from the graph so
    matches are reasonably likely; regexes mixed in as '.*' and
    alternations."""
    graph_node_labels = sorted(set(graph.nodes.values()))
    graph_edge_labels = sorted({l for _, _, l in graph.edges}) or ["r"]

    def node_label() -> str:
        roll = rng.random()
        if roll < 0.15:
            return ".*"
        if roll < 0.3:
            return "(" + "|".join(rng.sample(LABEL_POOL, 2)) + ")"
        if roll < 0.85:
            return rng.choice(graph_node_labels)
        return rng.choice(LABEL_POOL)

    def edge_label() -> str:
        roll = rng.random()
        if roll < 0.1:
            return ".*"
        if roll < 0.85:
            return rng.choice(graph_edge_labels)
        return rng.choice(EDGE_POOL)

    n_edges = rng.randint(0, max_edges)
    n_nodes = 1 if n_edges == 0 else rng.randint(2, n_edges + 1)
    nodes = {i: node_label() for i in range(n_nodes)}
    edges = set()
    for i in range(1, n_nodes):
        other = rng.randrange(i)
        e = (i, other) if rng.random() < 0.5 else (other, i)
        edges.add((e[0], e[1], edge_label()))
    while len(edges) < n_edges:
        s, t = rng.randrange(n_nodes), rng.randrange(n_nodes)
        edges.add((s, t, edge_label()))
    return Pattern(nodes, edges)


def oracle_tree_splits(x, y, max_depth: int) -> list:
    """Exhaustive greedy CART oracle: returns the nested split structure
    [(feature, left, right)] or ('leaf', n, n_positive) per node."""

    def gini(pos: int, n: int) -> Fraction:
        if n == 0:
            return Fraction(0)
        return 1 - Fraction(pos * pos + (n - pos) * (n - pos), n * n)

    def build(indices: list[int], depth: int):
        n = len(indices)
        pos = sum(1 for i in indices if y[i])
        if depth >= max_depth or pos in (0, n):
            return ("leaf", n, pos)
        best = None
        best_decrease = Fraction(0)
        for f in range(len(x[0])):
            right = [i for i in indices if x[i][f]]
            left = [i for i in indices if not x[i][f]]
            if not right or not left:
                continue
            pos_r = sum(1 for i in right if y[i])
            decrease = gini(pos, n) - (
                Fraction(len(left), n) * gini(pos - pos_r, len(left))
                + Fraction(len(right), n) * gini(pos_r, len(right))
            )
            if decrease > best_decrease:
                best_decrease = decrease
                best = f
        if best is None:
            return ("leaf", n, pos)
        left = [i for i in indices if not x[i][best]]
        right = [i for i in indices if x[i][best]]
        return (best, build(left, depth + 1), build(right, depth + 1))

    return build(list(range(len(x))), 0)


def tree_structure(node) -> list:
    """The same nested structure as oracle_tree_splits, from a TreeNode."""
    if node.is_leaf:
        return ("leaf", node.n_samples, node.n_positive)
    return (node.feature, tree_structure(node.left), tree_structure(node.right))
