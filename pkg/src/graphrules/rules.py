"""Rule systems: per-class disjunctions of pattern conjunctions, plus
one-vs-rest evaluation with per-rule and aggregate metrics."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .graphs import LabeledGraph
from .matching import Pattern, matches


class RuleError(ValueError):
    """Structurally invalid rule or rule-file contents."""


class UnknownClassError(RuleError):
    """Class label absent from the dataset's label inventory."""


class UnknownRuleError(RuleError):
    """Rule index out of range for a class."""


class EmptySplitError(RuleError):
    """Evaluation requested over a split with no rows."""


@dataclass(frozen=True)
class Clause:
    pattern: Pattern
    negated: bool = False


@dataclass(frozen=True)
class Rule:
    """Conjunction of clauses bound to one class; fires iff every positive
    clause matches and no negated clause does."""

    clauses: tuple[Clause, ...]
    class_label: str

    def __init__(self, clauses: Iterable[Clause], class_label: str):
        clauses = tuple(clauses)
        if not clauses:
            raise RuleError("rule must have at least one clause")
        if all(c.negated for c in clauses):
            raise RuleError("rule must have at least one positive clause")
        if not isinstance(class_label, str) or not class_label:
            raise RuleError("class label must be a non-empty string")
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "class_label", class_label)

    def fires(self, graph: LabeledGraph) -> bool:
        for clause in self.clauses:
            if matches(clause.pattern, graph) == clause.negated:
                return False
        return True

    def to_json_dict(self) -> dict:
        return {
            "clauses": [
                {"penman": c.pattern.to_penman(), "negated": c.negated}
                for c in self.clauses
            ]
        }

    @classmethod
    def from_json_dict(cls, payload: dict, class_label: str) -> "Rule":
        if not isinstance(payload, dict) or not isinstance(payload.get("clauses"), list):
            raise RuleError("rule must be an object with a 'clauses' list")
        clauses = []
        for entry in payload["clauses"]:
            if not isinstance(entry, dict) or "penman" not in entry:
                raise RuleError("clause must be an object with a 'penman' key")
            negated = entry.get("negated", False)
            if not isinstance(negated, bool):
                raise RuleError("'negated' must be a boolean")
            clauses.append(Clause(Pattern.from_penman(entry["penman"]), negated))
        return cls(clauses, class_label)


class RuleSystem:
    """Ordered rules per class label; a graph is predicted as a class iff
    any of that class's rules fires."""

    __slots__ = ("_rules",)

    def __init__(self, rules_by_class: Mapping[str, Iterable[Rule]] | None = None):
        normalized: dict[str, tuple[Rule, ...]] = {}
        for label, rules in (rules_by_class or {}).items():
            if not isinstance(label, str) or not label:
                raise RuleError("class label must be a non-empty string")
            rules = tuple(rules)
            for rule in rules:
                if rule.class_label != label:
                    raise RuleError(
                        f"rule labeled {rule.class_label!r} under class {label!r}"
                    )
            normalized[label] = rules
        self._rules = normalized

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(self._rules))

    @property
    def n_rules(self) -> int:
        return sum(len(rules) for rules in self._rules.values())

    def rules_for(self, class_label: str) -> tuple[Rule, ...]:
        return self._rules.get(class_label, ())

    def with_rule(self, rule: Rule) -> "RuleSystem":
        updated = dict(self._rules)
        updated[rule.class_label] = updated.get(rule.class_label, ()) + (rule,)
        return RuleSystem(updated)

    def without_rule(self, class_label: str, index: int) -> "RuleSystem":
        existing = self._require(class_label, index)
        updated = dict(self._rules)
        remaining = existing[:index] + existing[index + 1 :]
        if remaining:
            updated[class_label] = remaining
        else:
            del updated[class_label]
        return RuleSystem(updated)

    def with_replaced_rule(self, index: int, rule: Rule) -> "RuleSystem":
        existing = self._require(rule.class_label, index)
        updated = dict(self._rules)
        updated[rule.class_label] = existing[:index] + (rule,) + existing[index + 1 :]
        return RuleSystem(updated)

    def _require(self, class_label: str, index: int) -> tuple[Rule, ...]:
        if class_label not in self._rules:
            raise UnknownClassError(f"no rules for class {class_label!r}")
        existing = self._rules[class_label]
        if not 0 <= index < len(existing):
            raise UnknownRuleError(
                f"rule index {index} out of range for class {class_label!r}"
            )
        return existing

    def to_json_dict(self) -> dict:
        return {
            "classes": {
                label: [rule.to_json_dict() for rule in rules]
                for label, rules in sorted(self._rules.items())
            }
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "RuleSystem":
        if not isinstance(payload, dict) or not isinstance(payload.get("classes"), dict):
            raise RuleError("rule file must be an object with a 'classes' mapping")
        rules_by_class = {}
        for label, rule_list in payload["classes"].items():
            if not isinstance(rule_list, list):
                raise RuleError(f"rules for class {label!r} must be a list")
            rules_by_class[label] = [Rule.from_json_dict(r, label) for r in rule_list]
        return cls(rules_by_class)

    def __eq__(self, other: object):
        if not isinstance(other, RuleSystem):
            return NotImplemented
        return self._rules == other._rules

    def __repr__(self) -> str:
        return f"RuleSystem(classes={len(self._rules)}, rules={self.n_rules})"


def predict(system: RuleSystem, graph: LabeledGraph) -> set[str]:
    return {
        label
        for label in system.classes
        if any(rule.fires(graph) for rule in system.rules_for(label))
    }


@dataclass(frozen=True)
class MetricRecord:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    true_positive_ids: tuple[int, ...] = field(default=())
    false_positive_ids: tuple[int, ...] = field(default=())
    false_negative_ids: tuple[int, ...] = field(default=())

    def to_json_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "true_positive_ids": list(self.true_positive_ids),
            "false_positive_ids": list(self.false_positive_ids),
            "false_negative_ids": list(self.false_negative_ids),
        }


def metric_record(gold: set[int], predicted: set[int], n_rows: int) -> MetricRecord:
    tp_ids = sorted(predicted & gold)
    fp_ids = sorted(predicted - gold)
    fn_ids = sorted(gold - predicted)
    tp, fp, fn = len(tp_ids), len(fp_ids), len(fn_ids)
    tn = n_rows - tp - fp - fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricRecord(
        tp, fp, fn, tn, precision, recall, f1,
        tuple(tp_ids), tuple(fp_ids), tuple(fn_ids),
    )


@dataclass(frozen=True)
class EvalReport:
    class_label: str
    split: str
    per_rule: tuple[MetricRecord, ...]
    total: MetricRecord

    def to_json_dict(self) -> dict:
        return {
            "class": self.class_label,
            "split": self.split,
            "rules": [
                {"index": i, **record.to_json_dict()}
                for i, record in enumerate(self.per_rule)
            ],
            "total": self.total.to_json_dict(),
        }


def evaluate(system: RuleSystem, dataset, class_label: str, split: str) -> EvalReport:
    """One-vs-rest evaluation of `class_label`'s rules over one split.

    Aggregate prediction is the union of per-rule firings, so the total row
    is exactly the disjunction semantics of the rule list.
    """
    rows = list(getattr(dataset, "rows", dataset))
    inventory = set()
    for row in rows:
        inventory.update(row.labels)
    if class_label not in inventory and not system.rules_for(class_label):
        raise UnknownClassError(f"unknown class {class_label!r}")
    split_rows = [row for row in rows if row.split == split]
    if not split_rows:
        raise EmptySplitError(f"no rows in split {split!r}")

    gold = {row.id for row in split_rows if class_label in row.labels}
    n = len(split_rows)
    per_rule = []
    union: set[int] = set()
    for rule in system.rules_for(class_label):
        fired = {row.id for row in split_rows if rule.fires(row.graph)}
        union |= fired
        per_rule.append(metric_record(gold, fired, n))
    return EvalReport(class_label, split, tuple(per_rule), metric_record(gold, union, n))
