"""Feature ranking for rule suggestions: a small CART-style decision tree
(Gini impurity, boolean splits) and a plain TP-FP count.

The tree is grown with exact rational arithmetic for split comparisons so
ranking is deterministic across platforms; ties break toward the lowest
feature id.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .features import DEFAULT_MAX_EDGES, FeatureTable, build_feature_table
from .matching import Pattern

DEFAULT_MAX_DEPTH = 5
RANKING_METHODS = ("gini", "tp_fp")


class DegenerateLabelsError(ValueError):
    """All-positive or all-negative training labels."""


class NoPositivesError(ValueError):
    """No training row carries the requested class."""


@dataclass(frozen=True)
class TreeNode:
    n_samples: int
    n_positive: int
    gini: float
    feature: int | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def prediction(self) -> bool:
        return self.n_positive * 2 > self.n_samples


@dataclass(frozen=True, eq=False)
class DecisionTree:
    root: TreeNode
    importances: np.ndarray

    def predict_row(self, row: np.ndarray) -> bool:
        node = self.root
        while not node.is_leaf:
            node = node.right if row[node.feature] else node.left
        return node.prediction


def _gini(positive: int, total: int) -> Fraction:
    if total == 0:
        return Fraction(0)
    negative = total - positive
    return 1 - Fraction(positive * positive + negative * negative, total * total)


def train_tree(
    table: FeatureTable | np.ndarray,
    gold: np.ndarray,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> DecisionTree:
    x = table.presence if isinstance(table, FeatureTable) else np.asarray(table, dtype=bool)
    y = np.asarray(gold, dtype=bool)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ValueError("feature matrix and labels must align")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    if x.shape[0] == 0:
        raise ValueError("no training rows")
    if y.all() or not y.any():
        raise DegenerateLabelsError("labels are all one class")

    n_total = x.shape[0]
    accumulated: dict[int, Fraction] = {}

    def grow(idx: np.ndarray, depth: int) -> TreeNode:
        n = idx.size
        positive = int(y[idx].sum())
        impurity = _gini(positive, n)
        node_gini = float(impurity)
        if depth >= max_depth or positive == 0 or positive == n:
            return TreeNode(n, positive, node_gini)

        sub_x = x[idx]
        right_sizes = sub_x.sum(axis=0)
        right_positives = sub_x[y[idx]].sum(axis=0)
        best_feature = None
        best_decrease = Fraction(0)
        for f in range(x.shape[1]):
            n_right = int(right_sizes[f])
            if n_right == 0 or n_right == n:
                continue
            p_right = int(right_positives[f])
            weighted = (
                Fraction(n - n_right, n) * _gini(positive - p_right, n - n_right)
                + Fraction(n_right, n) * _gini(p_right, n_right)
            )
            decrease = impurity - weighted
            if decrease > best_decrease:
                best_decrease = decrease
                best_feature = f
        if best_feature is None:
            return TreeNode(n, positive, node_gini)

        accumulated[best_feature] = (
            accumulated.get(best_feature, Fraction(0))
            + Fraction(n, n_total) * best_decrease
        )
        mask = sub_x[:, best_feature]
        left = grow(idx[~mask], depth + 1)
        right = grow(idx[mask], depth + 1)
        return TreeNode(n, positive, node_gini, best_feature, left, right)

    root = grow(np.arange(n_total), 0)
    importances = np.zeros(x.shape[1], dtype=float)
    total = sum(accumulated.values(), Fraction(0))
    if total > 0:
        for f, value in accumulated.items():
            importances[f] = float(value / total)
    return DecisionTree(root, importances)


def rank_features(
    table: FeatureTable | np.ndarray,
    gold: np.ndarray,
    method: str = "gini",
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> list[tuple[int, float]]:
    """Feature ids with scores, best first; ties break on lowest id.

    gini: normalized impurity-decrease importances of the fitted tree.
    tp_fp: true-positive count minus false-positive count per feature.
    """
    if method not in RANKING_METHODS:
        raise ValueError(f"unknown ranking method {method!r}")
    x = table.presence if isinstance(table, FeatureTable) else np.asarray(table, dtype=bool)
    y = np.asarray(gold, dtype=bool)
    if method == "gini":
        scores = train_tree(x, y, max_depth).importances
    else:
        scores = (x[y].sum(axis=0) - x[~y].sum(axis=0)).astype(float)
    order = sorted(range(x.shape[1]), key=lambda f: (-scores[f], f))
    return [(f, float(scores[f])) for f in order]


@dataclass(frozen=True)
class Suggestion:
    pattern: Pattern
    tp: int
    fp: int
    train_precision: float
    train_recall: float
    score: float
    method: str

    def to_json_dict(self) -> dict:
        return {
            "penman": self.pattern.to_penman(),
            "tp": self.tp,
            "fp": self.fp,
            "precision": self.train_precision,
            "recall": self.train_recall,
            "score": self.score,
            "method": self.method,
        }


def _train_rows(dataset) -> list:
    rows = list(getattr(dataset, "rows", dataset))
    return [row for row in rows if getattr(row, "split", "train") == "train"]


def suggest(
    dataset,
    class_label: str,
    k: int,
    method: str = "gini",
    n_edges: int = DEFAULT_MAX_EDGES,
    max_depth: int = DEFAULT_MAX_DEPTH,
    table: FeatureTable | None = None,
) -> list[Suggestion]:
    """Top-k candidate patterns for `class_label`, ranked on the training
    split. A prebuilt `table` must align with the dataset's training rows."""
    if k < 1:
        raise ValueError("k must be positive")
    rows = _train_rows(dataset)
    if not rows:
        raise ValueError("training split is empty")
    gold = np.array([class_label in row.labels for row in rows], dtype=bool)
    if not gold.any():
        raise NoPositivesError(f"no training rows labeled {class_label!r}")
    if table is None:
        table = build_feature_table([(row.id, row.graph) for row in rows], n_edges)
    ranking = rank_features(table, gold, method, max_depth)

    n_gold = int(gold.sum())
    suggestions = []
    for feature_id, score in ranking[:k]:
        column = table.presence[:, feature_id]
        tp = int(np.count_nonzero(column & gold))
        fp = int(np.count_nonzero(column & ~gold))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / n_gold
        suggestions.append(
            Suggestion(
                Pattern.literal(table.catalog.features[feature_id]),
                tp, fp, precision, recall, score, method,
            )
        )
    return suggestions
