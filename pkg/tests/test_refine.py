import pytest

from graphrules import Clause, Pattern, Rule, matches, parse_penman, refine_pattern, refine_rule
from graphrules.refine import (
    NoCandidatesError,
    NodeNotRegexError,
    NoneAcceptedError,
    RefineError,
    pick_regex_node,
)


class FakeRow:
    def __init__(self, id, graph, labels, split="train"):
        self.id = id
        self.graph = graph
        self.labels = set(labels)
        self.split = split


def planted_rows():
    """dump/pour are pure ED verbs; divide appears once positive, nine
    negative; slice never appears positive."""
    rows = []
    i = 0
    for verb, n_pos, n_neg in [("dump", 6, 0), ("pour", 4, 0), ("divide", 1, 9), ("slice", 0, 5)]:
        for _ in range(n_pos):
            rows.append(FakeRow(i, parse_penman(f"(a / {verb} :2 (b / entity2))"), ["ed"]))
            i += 1
        for _ in range(n_neg):
            rows.append(FakeRow(i, parse_penman(f"(a / {verb} :2 (b / entity2))"), []))
            i += 1
    return rows


REGEX = Pattern.from_penman("(a / .* :2 (b / entity2))")


class TestRefinePattern:
    def test_accepts_high_precision_labels_only(self):
        result = refine_pattern(REGEX, 0, planted_rows(), "ed")
        assert [s.label for s in result.accepted] == ["dump", "pour"]
        assert {s.label for s in result.rejected} == {"divide", "slice"}
        assert result.refined_pattern.label(0) == "(dump|pour)"

    def test_accepted_stats_verified(self):
        rows = planted_rows()
        result = refine_pattern(REGEX, 0, rows, "ed")
        gold = {r.id for r in rows if "ed" in r.labels}
        for stats in result.accepted:
            sub = REGEX.with_node_label(0, stats.label)
            matched = {r.id for r in rows if matches(sub, r.graph)}
            assert len(matched & gold) == stats.tp
            assert stats.precision > 0.9 and stats.recall > 0

    def test_refined_matches_union_of_accepted(self):
        rows = planted_rows()
        result = refine_pattern(REGEX, 0, rows, "ed")
        refined_set = {r.id for r in rows if matches(result.refined_pattern, r.graph)}
        union = set()
        for stats in result.accepted:
            sub = REGEX.with_node_label(0, stats.label)
            union |= {r.id for r in rows if matches(sub, r.graph)}
        assert refined_set == union

    def test_threshold_is_strict(self):
        # 9 tp, 1 fp → precision exactly 0.9, must be rejected at 0.9
        rows = [
            FakeRow(i, parse_penman("(a / tip :2 (b / entity2))"), ["ed"] if i < 9 else [])
            for i in range(10)
        ]
        with pytest.raises(NoneAcceptedError):
            refine_pattern(REGEX, 0, rows, "ed", threshold=0.9)
        result = refine_pattern(REGEX, 0, rows, "ed", threshold=0.89)
        assert [s.label for s in result.accepted] == ["tip"]

    def test_node_not_regex(self):
        literal = Pattern.from_penman("(a / into :2 (b / entity2))")
        with pytest.raises(NodeNotRegexError):
            refine_pattern(literal, 0, planted_rows(), "ed")

    def test_unknown_node(self):
        with pytest.raises(RefineError):
            refine_pattern(REGEX, 9, planted_rows(), "ed")

    def test_no_candidates(self):
        rows = [FakeRow(0, parse_penman("(a / x :9 (b / y))"), ["ed"])]
        with pytest.raises(NoCandidatesError):
            refine_pattern(REGEX, 0, rows, "ed")

    def test_no_gold_positives(self):
        rows = [FakeRow(0, parse_penman("(a / dump :2 (b / entity2))"), [])]
        with pytest.raises(RefineError):
            refine_pattern(REGEX, 0, rows, "ed")

    def test_training_split_only(self):
        rows = planted_rows()
        # a val-only verb must not become a candidate
        rows.append(FakeRow(99, parse_penman("(a / shove :2 (b / entity2))"), ["ed"], split="val"))
        result = refine_pattern(REGEX, 0, rows, "ed")
        mentioned = {s.label for s in result.accepted} | {s.label for s in result.rejected}
        assert "shove" not in mentioned

    def test_escaped_alternation(self):
        rows = [FakeRow(0, parse_penman('(a / "a.b" :2 (b / entity2))'), ["ed"])]
        result = refine_pattern(REGEX, 0, rows, "ed")
        assert result.refined_pattern.label(0) == "(a\\.b)"
        assert matches(result.refined_pattern, rows[0].graph)
        assert not matches(
            result.refined_pattern, parse_penman("(a / axb :2 (b / entity2))")
        )


class TestRefineRule:
    def test_replaces_clause(self):
        rule = Rule([Clause(REGEX)], "ed")
        new_rule, result = refine_rule(rule, 0, None, planted_rows(), "ed")
        assert new_rule.clauses[0].pattern.label(0) == "(dump|pour)"
        assert new_rule.class_label == "ed"
        assert result.accepted

    def test_auto_picks_unique_regex_node(self):
        assert pick_regex_node(REGEX) == 0

    def test_ambiguous_regex_nodes_need_explicit_choice(self):
        p = Pattern.from_penman("(a / .* :2 (b / enti.*))")
        with pytest.raises(RefineError):
            pick_regex_node(p)
        rule = Rule([Clause(p)], "ed")
        new_rule, _ = refine_rule(rule, 0, 0, planted_rows(), "ed")
        assert new_rule.clauses[0].pattern.label(0) == "(dump|pour)"

    def test_negated_clause_rejected(self):
        rule = Rule([Clause(Pattern.from_penman("(a / x)")), Clause(REGEX, negated=True)], "ed")
        with pytest.raises(RefineError):
            refine_rule(rule, 1, None, planted_rows(), "ed")

    def test_clause_index_out_of_range(self):
        rule = Rule([Clause(REGEX)], "ed")
        with pytest.raises(RefineError):
            refine_rule(rule, 4, None, planted_rows(), "ed")
