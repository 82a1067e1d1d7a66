import pytest
from random import Random

from graphrules import (
    ConlluError,
    GraphError,
    LabeledGraph,
    PenmanSyntaxError,
    parse_conllu,
    parse_penman,
    penman_root,
    serialize_penman,
    to_dot,
)
from graphrules.graphs import DisconnectedGraphError

from helpers import are_isomorphic, random_graph


class TestLabeledGraph:
    def test_basic_construction(self):
        g = LabeledGraph({0: "A", 1: "B"}, {(0, 1, "R")})
        assert g.label(0) == "a"
        assert g.edges == frozenset({(0, 1, "r")})

    def test_lowercasing_is_idempotent(self):
        g1 = LabeledGraph({0: "Into", 1: "ENTITY2"}, {(0, 1, "Rel")})
        g2 = LabeledGraph(dict(g1.nodes), set(g1.edges))
        assert g1 == g2

    def test_rejects_dangling_edge(self):
        with pytest.raises(GraphError):
            LabeledGraph({0: "a"}, {(0, 1, "r")})

    def test_rejects_empty_label(self):
        with pytest.raises(GraphError):
            LabeledGraph({0: ""})
        with pytest.raises(GraphError):
            LabeledGraph({0: "a", 1: "b"}, {(0, 1, "")})

    def test_parallel_edges_with_distinct_labels(self):
        g = LabeledGraph({0: "a", 1: "b"}, {(0, 1, "r"), (0, 1, "s")})
        assert g.n_edges == 2

    def test_duplicate_triples_collapse(self):
        g = LabeledGraph({0: "a", 1: "b"}, [(0, 1, "r"), (0, 1, "R")])
        assert g.n_edges == 1

    def test_self_loop_and_connectivity(self):
        g = LabeledGraph({0: "a"}, {(0, 0, "r")})
        assert g.is_connected()
        assert not LabeledGraph({0: "a", 1: "b"}).is_connected()


class TestParsePenman:
    def test_two_node_example(self):
        g = parse_penman("(u_1 / into :2 (u_2 / entity2))")
        assert sorted(g.nodes.values()) == ["entity2", "into"]
        ((s, t, l),) = g.edges
        assert (g.label(s), l, g.label(t)) == ("into", "2", "entity2")

    def test_four_node_example(self):
        g = parse_penman(
            "(u_1 / into :2 (u_2 / entity2) :1 (u_3 / .* :2 (u_4 / entity1)))"
        )
        assert g.n_nodes == 4
        labeled = {(g.label(s), l, g.label(t)) for s, t, l in g.edges}
        assert labeled == {
            ("into", "2", "entity2"),
            ("into", "1", ".*"),
            (".*", "2", "entity1"),
        }

    def test_self_loop_reentrancy(self):
        g = parse_penman("(a / x :r a)")
        assert g.nodes == {0: "x"}
        assert g.edges == frozenset({(0, 0, "r")})

    def test_reentrancy_shares_node(self):
        g = parse_penman("(a / x :r (b / y) :s b)")
        assert g.n_nodes == 2
        assert {(s, t) for s, t, _ in g.edges} == {(0, 1)}

    def test_forward_reference(self):
        g = parse_penman("(a / x :r b :s (b / y))")
        assert g.n_nodes == 2
        assert g.n_edges == 2

    def test_of_inversion(self):
        g = parse_penman("(a / x :r-of (b / y))")
        ((s, t, l),) = g.edges
        assert (g.label(s), l, g.label(t)) == ("y", "r", "x")

    def test_quoted_labels(self):
        g = parse_penman('(a / "two words" :r (b / y))')
        assert g.label(0) == "two words"

    def test_quoted_role_is_never_inverted(self):
        g = parse_penman('(a / x :"r-of" (b / y))')
        ((s, t, l),) = g.edges
        assert (g.label(s), l, g.label(t)) == ("x", "r-of", "y")

    def test_unbalanced_parens(self):
        with pytest.raises(PenmanSyntaxError) as exc:
            parse_penman("(a / x :r (b / y)")
        assert exc.value.pos is not None

    def test_duplicate_variable(self):
        with pytest.raises(PenmanSyntaxError, match="duplicate"):
            parse_penman("(a / x :r (a / y))")

    def test_undefined_variable(self):
        with pytest.raises(PenmanSyntaxError, match="undefined"):
            parse_penman("(a / x :r b)")

    def test_empty_concept(self):
        with pytest.raises(PenmanSyntaxError):
            parse_penman("(a / :r (b / y))")

    def test_trailing_input(self):
        with pytest.raises(PenmanSyntaxError):
            parse_penman("(a / x) (b / y)")

    def test_alpha_renaming_yields_isomorphic_graphs(self):
        g1 = parse_penman("(a / x :r (b / y) :s b)")
        g2 = parse_penman("(n0 / x :r (n1 / y) :s n1)")
        assert are_isomorphic(g1, g2)


class TestSerializePenman:
    def test_two_node_example(self):
        g = parse_penman("(u_1 / into :2 (u_2 / entity2))")
        assert serialize_penman(g, 0) == "(u_1 / into :2 (u_2 / entity2))"

    def test_single_node(self):
        g = LabeledGraph({0: "drop"})
        assert serialize_penman(g, 0) == "(u_1 / drop)"

    def test_against_direction_uses_of(self):
        g = LabeledGraph({0: "x", 1: "y"}, {(1, 0, "r")})
        assert serialize_penman(g, 0) == "(u_1 / x :r-of (u_2 / y))"

    def test_disconnected_from_root_raises(self):
        g = LabeledGraph({0: "a", 1: "b"})
        with pytest.raises(DisconnectedGraphError):
            serialize_penman(g, 0)

    def test_unknown_root_raises(self):
        g = LabeledGraph({0: "a"})
        with pytest.raises(GraphError):
            serialize_penman(g, 5)

    def test_deterministic_child_order(self):
        g = LabeledGraph({0: "a", 1: "c", 2: "b"}, {(0, 1, "r"), (0, 2, "r"), (0, 2, "q")})
        assert serialize_penman(g, 0) == serialize_penman(g, 0)
        # edge label sorts before target label; the revisited edge is a bare ref
        assert serialize_penman(g, 0) == "(u_1 / a :q (u_2 / b :r-of u_1) :r (u_3 / c))"

    def test_quote_needing_labels_roundtrip(self):
        g = LabeledGraph({0: "two words", 1: 'has "quote"'}, {(0, 1, "a:b")})
        text = serialize_penman(g, 0)
        assert are_isomorphic(parse_penman(text), g)

    def test_of_suffixed_edge_label_roundtrips(self):
        g = LabeledGraph({0: "x", 1: "y"}, {(0, 1, "part-of")})
        for root in (0, 1):
            assert are_isomorphic(parse_penman(serialize_penman(g, root)), g)

    def test_cycle_roundtrip(self):
        g = LabeledGraph(
            {0: "a", 1: "b", 2: "c"}, {(0, 1, "r"), (1, 2, "s"), (2, 0, "t")}
        )
        assert are_isomorphic(parse_penman(serialize_penman(g, 0)), g)

    def test_roundtrip_random_graphs(self):
        rng = Random(4242)
        for _ in range(60):
            g = random_graph(rng, max_nodes=6, max_edges=8, connected=True)
            root = penman_root(g)
            assert are_isomorphic(parse_penman(serialize_penman(g, root)), g)


class TestParseConllu:
    SIMPLE = (
        "# text = Boys sleep\n"
        "1\tBoys\tboy\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
        "2\tsleep\tsleep\tVERB\t_\t_\t0\troot\t_\t_\n"
    )

    def test_two_token_sentence(self):
        (g,) = parse_conllu(self.SIMPLE)
        assert sorted(g.nodes.values()) == ["boy", "sleep"]
        ((s, t, l),) = g.edges
        assert (g.label(s), l, g.label(t)) == ("sleep", "nsubj", "boy")

    def test_single_token_sentence(self):
        (g,) = parse_conllu("1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n")
        assert g.n_nodes == 1 and g.n_edges == 0

    def test_two_sentences(self):
        text = self.SIMPLE + "\n" + "1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n"
        assert len(parse_conllu(text)) == 2

    def test_lemma_fallback_to_form(self):
        (g,) = parse_conllu("1\tWord\t_\tNOUN\t_\t_\t0\troot\t_\t_\n")
        assert list(g.nodes.values()) == ["word"]

    def test_multiword_ranges_and_empty_nodes_skipped(self):
        text = (
            "1-2\tdoesn't\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tdoes\tdo\tAUX\t_\t_\t0\troot\t_\t_\n"
            "2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n"
            "2.1\televen\televen\t_\t_\t_\t_\t_\t_\t_\n"
        )
        (g,) = parse_conllu(text)
        assert g.n_nodes == 2

    def test_wrong_column_count(self):
        with pytest.raises(ConlluError) as exc:
            parse_conllu("1\tword\tword\n")
        assert exc.value.line == 1

    def test_head_out_of_range(self):
        with pytest.raises(ConlluError, match="head"):
            parse_conllu("1\ta\ta\tX\t_\t_\t9\tdep\t_\t_\n")

    def test_text_metadata_captured(self):
        from graphrules.graphs import iter_conllu

        (sentence,) = iter_conllu(self.SIMPLE)
        assert sentence.text == "Boys sleep"


class TestToDot:
    def test_contains_nodes_and_edges(self):
        g = parse_penman("(u_1 / into :2 (u_2 / entity2))")
        dot = to_dot(g)
        assert dot.startswith("digraph")
        assert '"into"' in dot and '"entity2"' in dot
        assert 'label="2"' in dot

    def test_highlight_marks_nodes(self):
        g = parse_penman("(u_1 / into :2 (u_2 / entity2))")
        dot = to_dot(g, highlight={0})
        assert dot.count("filled") == 1

    def test_escapes_quotes(self):
        g = LabeledGraph({0: 'say "hi"'})
        assert '\\"hi\\"' in to_dot(g)
