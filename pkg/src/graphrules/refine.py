"""Regex-node refinement: replace a regex-labeled pattern node with an
alternation of the concrete labels it binds to on the training split,
keeping only labels whose substituted pattern clears a precision threshold.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .matching import Pattern, find_mappings, is_regex_label, matches
from .rules import Rule

DEFAULT_THRESHOLD = 0.9


class RefineError(ValueError):
    """Refinement request cannot be satisfied."""


class NodeNotRegexError(RefineError):
    """Selected node's label is a plain literal."""


class NoCandidatesError(RefineError):
    """Pattern never matches the training split, so there are no bindings."""


class NoneAcceptedError(RefineError):
    """Every candidate label fell at or below the precision threshold."""


@dataclass(frozen=True)
class LabelStats:
    label: str
    tp: int
    fp: int
    precision: float
    recall: float

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "tp": self.tp,
            "fp": self.fp,
            "precision": self.precision,
            "recall": self.recall,
        }


@dataclass(frozen=True)
class RefinementResult:
    refined_pattern: Pattern
    accepted: tuple[LabelStats, ...]
    rejected: tuple[LabelStats, ...]

    def to_json_dict(self) -> dict:
        return {
            "penman": self.refined_pattern.to_penman(),
            "accepted": [s.to_json_dict() for s in self.accepted],
            "rejected": [s.to_json_dict() for s in self.rejected],
        }


def pick_regex_node(pattern: Pattern) -> int:
    """The pattern's sole regex-labeled node; ambiguity is an error."""
    regex_nodes = pattern.regex_nodes()
    if not regex_nodes:
        raise NodeNotRegexError("pattern has no regex-labeled node")
    if len(regex_nodes) > 1:
        raise RefineError(
            "pattern has several regex-labeled nodes; a node must be chosen"
        )
    return regex_nodes[0]


def _train_rows(dataset) -> list:
    rows = list(getattr(dataset, "rows", dataset))
    return [row for row in rows if getattr(row, "split", "train") == "train"]


def refine_pattern(
    pattern: Pattern,
    node: int,
    dataset,
    class_label: str,
    threshold: float = DEFAULT_THRESHOLD,
) -> RefinementResult:
    """Specialize `node`'s regex label into a sorted alternation of accepted
    concrete labels.

    A label is accepted iff substituting it (escaped) for the regex keeps
    strictly more than `threshold` precision with nonzero recall against
    `class_label` on the training rows. Comparison to the threshold is done
    in exact rational arithmetic on the float's value.
    """
    if node not in pattern.nodes:
        raise RefineError(f"pattern has no node {node}")
    if not is_regex_label(pattern.label(node)):
        raise NodeNotRegexError(f"label {pattern.label(node)!r} is not a regex")
    rows = _train_rows(dataset)
    if not rows:
        raise RefineError("training split is empty")
    gold_ids = {row.id for row in rows if class_label in row.labels}
    if not gold_ids:
        raise RefineError(f"no training rows labeled {class_label!r}")

    candidates: set[str] = set()
    for row in rows:
        for mapping in find_mappings(pattern, row.graph):
            candidates.add(row.graph.label(mapping[node]))
    if not candidates:
        raise NoCandidatesError("pattern matches no training row")

    threshold_frac = Fraction(*float(threshold).as_integer_ratio())
    accepted: list[LabelStats] = []
    rejected: list[LabelStats] = []
    for label in sorted(candidates):
        substituted = pattern.with_node_label(node, re.escape(label))
        matched = {row.id for row in rows if matches(substituted, row.graph)}
        tp = len(matched & gold_ids)
        fp = len(matched - gold_ids)
        stats = LabelStats(
            label,
            tp,
            fp,
            tp / (tp + fp) if tp + fp else 0.0,
            tp / len(gold_ids),
        )
        if tp and Fraction(tp, tp + fp) > threshold_frac:
            accepted.append(stats)
        else:
            rejected.append(stats)
    if not accepted:
        raise NoneAcceptedError(
            f"no candidate label exceeds precision {threshold} with nonzero recall"
        )

    alternation = "(" + "|".join(re.escape(s.label) for s in accepted) + ")"
    refined = pattern.with_node_label(node, alternation)
    return RefinementResult(refined, tuple(accepted), tuple(rejected))


def refine_rule(
    rule: Rule,
    clause_index: int,
    node: int | None,
    dataset,
    class_label: str,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[Rule, RefinementResult]:
    """Refine one clause of a rule; returns the updated rule and the label
    statistics. `node=None` picks the clause's unique regex node."""
    if not 0 <= clause_index < len(rule.clauses):
        raise RefineError(f"clause index {clause_index} out of range")
    clause = rule.clauses[clause_index]
    if clause.negated:
        raise RefineError("only positive clauses can be refined")
    target = pick_regex_node(clause.pattern) if node is None else node
    result = refine_pattern(clause.pattern, target, dataset, class_label, threshold)
    new_clauses = list(rule.clauses)
    new_clauses[clause_index] = type(clause)(result.refined_pattern, clause.negated)
    return Rule(new_clauses, rule.class_label), result
