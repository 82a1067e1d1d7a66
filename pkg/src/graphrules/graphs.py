"""Directed labeled graphs plus PENMAN and CoNLL-U codecs.

The graph type here is the common currency of the whole package: every
input text is one :class:`LabeledGraph`, and rule patterns share its
structure. Graphs are general digraphs -- cycles, self loops and
reentrancy are all allowed, and parallel edges are fine as long as their
labels differ.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping

Edge = tuple[int, int, str]  # (source, target, label)

# Characters that end a bare PENMAN atom; labels containing any of these
# are serialized as quoted strings.
_ATOM_BREAK = set(' \t\r\n()"/:')


class GraphError(ValueError):
    """Invalid graph structure or unparseable graph text."""


class PenmanSyntaxError(GraphError):
    """PENMAN text rejected; `pos` is a character offset into the input."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class ConlluError(GraphError):
    """CoNLL-U text rejected; `line` is a 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class DisconnectedGraphError(GraphError):
    """Serialization root does not reach every node."""


class LabeledGraph:
    """Immutable directed graph with non-empty string labels on nodes and edges.

    Labels are lowercased on construction (ingestion normalization), so
    matching never has to worry about case. Node ids are opaque ints.
    """

    __slots__ = ("_nodes", "_edges", "_out", "_in")

    def __init__(self, nodes: Mapping[int, str], edges: Iterable[Edge] = ()):
        norm_nodes: dict[int, str] = {}
        for nid, label in nodes.items():
            if not isinstance(label, str) or not label:
                raise GraphError(f"node {nid} has an empty or non-string label")
            norm_nodes[int(nid)] = label.lower()
        norm_edges: set[Edge] = set()
        for src, tgt, label in edges:
            if not isinstance(label, str) or not label:
                raise GraphError(f"edge ({src}, {tgt}) has an empty or non-string label")
            if src not in norm_nodes or tgt not in norm_nodes:
                raise GraphError(f"edge ({src}, {tgt}, {label!r}) references a missing node")
            norm_edges.add((src, tgt, label.lower()))
        self._nodes = norm_nodes
        self._edges = frozenset(norm_edges)
        out: dict[int, list[Edge]] = {nid: [] for nid in norm_nodes}
        inc: dict[int, list[Edge]] = {nid: [] for nid in norm_nodes}
        for e in sorted(norm_edges):
            out[e[0]].append(e)
            inc[e[1]].append(e)
        self._out = out
        self._in = inc

    @property
    def nodes(self) -> dict[int, str]:
        return dict(self._nodes)

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._nodes))

    def label(self, node: int) -> str:
        return self._nodes[node]

    def has_node(self, node: int) -> bool:
        return node in self._nodes

    def out_edges(self, node: int) -> tuple[Edge, ...]:
        return tuple(self._out[node])

    def in_edges(self, node: int) -> tuple[Edge, ...]:
        return tuple(self._in[node])

    def incident_edges(self, node: int) -> tuple[Edge, ...]:
        loops = [e for e in self._out[node] if e[1] == node]
        plain = [e for e in self._out[node] if e[1] != node]
        plain += [e for e in self._in[node] if e[0] != node]
        return tuple(sorted(plain + loops))

    def neighbors(self, node: int) -> set[int]:
        """Adjacent node ids, ignoring edge direction."""
        out = {e[1] for e in self._out[node]}
        out.update(e[0] for e in self._in[node])
        return out

    def degree(self, node: int) -> int:
        return len(self._out[node]) + len(self._in[node])

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def is_connected(self) -> bool:
        """Weak connectivity (direction ignored). Empty graphs count as connected."""
        if not self._nodes:
            return True
        start = next(iter(self._nodes))
        return len(_reachable_undirected(self, start)) == len(self._nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((frozenset(self._nodes.items()), self._edges))

    def __repr__(self) -> str:
        return f"LabeledGraph(nodes={self._nodes!r}, edges={sorted(self._edges)!r})"


def _reachable_undirected(g: LabeledGraph, start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


# ---------------------------------------------------------------------------
# PENMAN codec
# ---------------------------------------------------------------------------
#
# Standard PENMAN with two conventions on top:
#   * a role suffixed "-of" is stored as the reversed edge with the suffix
#     stripped, and reversed edges are emitted with the suffix added;
#   * labels containing atom-breaking characters are emitted as quoted
#     strings. A quoted role is literal (never inverted); inversion of a
#     quote-needing label is written as :"label"-of.


def _read_quoted(text: str, i: int) -> tuple[str, int]:
    # text[i] == '"'
    start = i
    i += 1
    out = []
    while i < len(text):
        c = text[i]
        if c == "\\":
            if i + 1 >= len(text):
                raise PenmanSyntaxError("dangling escape in quoted string", i)
            out.append(text[i + 1])
            i += 2
            continue
        if c == '"':
            return "".join(out), i + 1
        out.append(c)
        i += 1
    raise PenmanSyntaxError("unterminated quoted string", start)


def _read_atom(text: str, i: int) -> tuple[str, int]:
    j = i
    while j < len(text) and text[j] not in _ATOM_BREAK:
        j += 1
    return text[i:j], j


def _tokenize_penman(text: str) -> list[tuple[str, object, int]]:
    """Yield (kind, value, pos) tokens; kinds: ( ) / atom str role."""
    tokens: list[tuple[str, object, int]] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            tokens.append((c, c, i))
            i += 1
        elif c == "/":
            tokens.append(("/", c, i))
            i += 1
        elif c == ":":
            pos = i
            i += 1
            if i < n and text[i] == '"':
                label, i = _read_quoted(text, i)
                inverted = text.startswith("-of", i)
                if inverted:
                    i += 3
            else:
                raw, i = _read_atom(text, i)
                inverted = raw.endswith("-of")
                label = raw[:-3] if inverted else raw
            if not label:
                raise PenmanSyntaxError("empty role label", pos)
            tokens.append(("role", (label, inverted), pos))
        elif c == '"':
            pos = i
            value, i = _read_quoted(text, i)
            tokens.append(("str", value, pos))
        else:
            pos = i
            value, i = _read_atom(text, i)
            if not value:
                raise PenmanSyntaxError(f"unexpected character {c!r}", pos)
            tokens.append(("atom", value, pos))
    return tokens


class _PenmanParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize_penman(text)
        self.i = 0
        self.var_ids: dict[str, int] = {}
        self.concepts: dict[int, str] = {}
        self.first_ref: dict[str, int] = {}  # var -> pos of first bare reference
        self.edges: set[Edge] = set()

    def _peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", None, len(self.text))

    def _next(self):
        tok = self._peek()
        self.i += 1
        return tok

    def _expect(self, kind: str, what: str):
        tok = self._next()
        if tok[0] != kind:
            raise PenmanSyntaxError(f"expected {what}", tok[2])
        return tok

    def _var_id(self, name: str) -> int:
        if name not in self.var_ids:
            self.var_ids[name] = len(self.var_ids)
        return self.var_ids[name]

    def parse(self) -> tuple[dict[int, str], set[Edge], int]:
        tok = self._peek()
        if tok[0] != "(":
            raise PenmanSyntaxError("expected '('", tok[2])
        root = self._parse_node()
        trailing = self._peek()
        if trailing[0] != "eof":
            raise PenmanSyntaxError("unexpected trailing input", trailing[2])
        for var, pos in self.first_ref.items():
            if self.var_ids[var] not in self.concepts:
                raise PenmanSyntaxError(f"reference to undefined variable {var!r}", pos)
        return self.concepts, self.edges, root

    def _parse_node(self) -> int:
        self._expect("(", "'('")
        kind, name, pos = self._next()
        if kind != "atom":
            raise PenmanSyntaxError("expected a variable name", pos)
        nid = self._var_id(name)
        if nid in self.concepts:
            raise PenmanSyntaxError(f"duplicate definition of variable {name!r}", pos)
        self._expect("/", "'/'")
        ckind, concept, cpos = self._next()
        if ckind not in ("atom", "str") or not concept:
            raise PenmanSyntaxError("empty or missing concept", cpos)
        self.concepts[nid] = concept
        while True:
            kind, value, pos = self._peek()
            if kind == ")":
                self._next()
                return nid
            if kind == "role":
                self._next()
                label, inverted = value
                target = self._parse_target()
                if inverted:
                    self.edges.add((target, nid, label))
                else:
                    self.edges.add((nid, target, label))
                continue
            raise PenmanSyntaxError("expected a role or ')'", pos)

    def _parse_target(self) -> int:
        kind, value, pos = self._peek()
        if kind == "(":
            return self._parse_node()
        if kind == "atom":
            self._next()
            self.first_ref.setdefault(value, pos)
            return self._var_id(value)
        raise PenmanSyntaxError("expected a nested node or variable reference", pos)


def parse_penman_parts(text: str) -> tuple[dict[int, str], set[Edge], int]:
    """Parse PENMAN into raw (nodes, edges, root) without label normalization.

    Node ids are assigned in order of first mention of each variable; the
    root is always id 0.
    """
    return _PenmanParser(text).parse()


def parse_penman(text: str) -> LabeledGraph:
    """Parse PENMAN text into a LabeledGraph (labels lowercased)."""
    nodes, edges, _root = parse_penman_parts(text)
    return LabeledGraph(nodes, edges)


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _concept_token(label: str) -> str:
    if any(c in _ATOM_BREAK for c in label):
        return _quote(label)
    return label


def _role_token(label: str, inverted: bool) -> str:
    if any(c in _ATOM_BREAK for c in label):
        return ":" + _quote(label) + ("-of" if inverted else "")
    if inverted:
        return f":{label}-of"
    if label.endswith("-of"):
        # quoting keeps the parser from stripping the suffix
        return ":" + _quote(label)
    return f":{label}"


def serialize_penman(graph, root: int) -> str:
    """Serialize to PENMAN from `root`, which must reach every node ignoring
    edge direction.

    Accepts anything exposing `.nodes` (id -> label) and `.edges` (triples),
    so regex-labeled patterns serialize through the same codec. Output is
    deterministic: children are ordered by edge label, then target label,
    with node ids as the final tie-break. Edges traversed against their
    direction get an "-of" role; revisited nodes become bare variable
    references.
    """
    nodes: dict[int, str] = graph.nodes
    if root not in nodes:
        raise GraphError(f"root {root} is not a node of the graph")
    incident: dict[int, list[Edge]] = {n: [] for n in nodes}
    for e in sorted(graph.edges):
        src, tgt, _ = e
        incident[src].append(e)
        if tgt != src:
            incident[tgt].append(e)
    reachable = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for src, tgt, _ in incident[u]:
            other = tgt if src == u else src
            if other not in reachable:
                reachable.add(other)
                stack.append(other)
    if reachable != set(nodes):
        raise DisconnectedGraphError(
            f"root {root} does not reach every node (ignoring direction)"
        )

    counter = itertools.count(1)
    variables: dict[int, str] = {}
    emitted: set[Edge] = set()

    def emit(node: int) -> str:
        var = f"u_{next(counter)}"
        variables[node] = var
        parts = [f"({var} / {_concept_token(nodes[node])}"]
        order = []
        for e in incident[node]:
            src, tgt, label = e
            inverted = tgt == node and src != node
            other = src if inverted else tgt
            order.append((label, nodes[other], inverted, other, e))
        for label, _other_label, inverted, other, e in sorted(order):
            if e in emitted:
                continue
            emitted.add(e)
            role = _role_token(label, inverted)
            if other in variables:
                parts.append(f" {role} {variables[other]}")
            else:
                parts.append(f" {role} {emit(other)}")
        parts.append(")")
        return "".join(parts)

    return emit(root)


def penman_root(graph) -> int:
    """Default serialization root: the smallest node id."""
    if not graph.nodes:
        raise GraphError("empty graph has no root")
    return min(graph.nodes)


def to_dot(graph, highlight: Iterable[int] = ()) -> str:
    """Render a graph or pattern as Graphviz DOT text for client-side display.

    `highlight` node ids get a filled style so matched subgraphs stand out.
    """
    marked = set(highlight)

    def esc(s: str) -> str:
        return s.replace("\\", "\\\\").replace('"', '\\"')

    lines = ["digraph g {"]
    for nid, label in sorted(graph.nodes.items()):
        attrs = f'label="{esc(label)}"'
        if nid in marked:
            attrs += ', style="filled", fillcolor="gold"'
        lines.append(f"  n{nid} [{attrs}];")
    for src, tgt, label in sorted(graph.edges):
        lines.append(f'  n{src} -> n{tgt} [label="{esc(label)}"];')
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# CoNLL-U ingestion
# ---------------------------------------------------------------------------


class ConlluSentence:
    """One parsed sentence: graph, dependency root (token with head 0, if
    unique), the `# text` comment when present, and the 1-based line where
    the sentence starts."""

    __slots__ = ("graph", "root", "text", "line")

    def __init__(self, graph: LabeledGraph, root: int | None, text: str | None, line: int):
        self.graph = graph
        self.root = root
        self.text = text
        self.line = line


def _build_sentence(
    tokens: list[tuple[int, str, str, int, str, int]], text: str | None, line: int
) -> ConlluSentence:
    # tokens: (id, form, lemma, head, deprel, line_no); columns validated per line
    ids = {tid for tid, *_ in tokens}
    nodes: dict[int, str] = {}
    edges: list[Edge] = []
    roots: list[int] = []
    for tid, form, lemma, _head, _deprel, _ln in tokens:
        label = lemma if lemma and lemma != "_" else form
        nodes[tid] = label.lower()
    for tid, _form, _lemma, head, deprel, line_no in tokens:
        if head == 0:
            roots.append(tid)
            continue
        if head not in ids:
            raise ConlluError(f"head index {head} out of range for token {tid}", line_no)
        edges.append((head, tid, deprel))
    graph = LabeledGraph(nodes, edges)
    return ConlluSentence(graph, roots[0] if roots else None, text, line)


def iter_conllu(text: str) -> Iterable[ConlluSentence]:
    """Yield one ConlluSentence per sentence block.

    One node per token, labeled with the lowercased lemma (form when the
    lemma is "_"); one head->dependent edge per non-root token, labeled with
    the deprel. Multiword ranges and empty nodes (decimal ids) are skipped.
    """
    tokens: list[tuple[int, str, str, int, str, int]] = []
    sent_text: str | None = None
    sent_line = 1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip():
            if tokens:
                yield _build_sentence(tokens, sent_text, sent_line)
                tokens, sent_text = [], None
            sent_line = line_no + 1
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("text") and "=" in body:
                sent_text = body.split("=", 1)[1].strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"expected 10 columns, got {len(cols)}", line_no)
        tid = cols[0]
        if "-" in tid or "." in tid:
            continue  # multiword range / empty node
        try:
            token_id = int(tid)
        except ValueError:
            raise ConlluError(f"bad token id {tid!r}", line_no) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluError(f"bad head index {cols[6]!r} for token {tid}", line_no) from None
        tokens.append((token_id, cols[1], cols[2], head, cols[7], line_no))
    if tokens:
        yield _build_sentence(tokens, sent_text, sent_line)


def parse_conllu(text: str) -> list[LabeledGraph]:
    """Parse CoNLL-U text into one LabeledGraph per sentence."""
    return [sent.graph for sent in iter_conllu(text)]
