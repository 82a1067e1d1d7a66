"""Dataset loading (JSONL/TSV/CoNLL-U), deterministic splitting, label
bootstrapping from rules, and state persistence.

Rows that fail to parse are collected as per-line errors instead of
aborting the load; only a corpus with zero usable rows is a hard failure.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

from .graphs import GraphError, LabeledGraph, iter_conllu, parse_penman
from .rules import RuleSystem, predict

SCHEMA_VERSION = 1
SPLITS = ("train", "val", "unlabeled")
TRAIN_FRACTION = 0.8
_FORMATS = ("jsonl", "tsv", "conllu")
_SUFFIXES = {".jsonl": "jsonl", ".json": "jsonl", ".tsv": "tsv", ".conllu": "conllu", ".conll": "conllu"}


class DatasetError(ValueError):
    pass


class VersionMismatchError(DatasetError):
    """Persisted state carries an unsupported schema_version."""


@dataclass(frozen=True)
class LoadError:
    line: int
    message: str


@dataclass
class DatasetRow:
    id: int
    text: str
    graph: LabeledGraph
    labels: set[str]
    split: str


@dataclass(frozen=True)
class AnnotationProposal:
    row_id: int
    proposed_labels: frozenset[str]
    # (class_label, rule_index) pairs for every rule that fired
    provenance: tuple[tuple[str, int], ...]


class Dataset:
    def __init__(self, rows: Iterable[DatasetRow], load_errors: Iterable[LoadError] = ()):
        self.rows = list(rows)
        self.by_id = {row.id: row for row in self.rows}
        if len(self.by_id) != len(self.rows):
            raise DatasetError("row ids must be unique")
        self.load_errors = list(load_errors)
        # Serializes label/split mutations and saves; readers are lock-free.
        self.lock = threading.RLock()

    def __len__(self) -> int:
        return len(self.rows)

    def label_inventory(self) -> set[str]:
        inventory: set[str] = set()
        for row in self.rows:
            inventory.update(row.labels)
        return inventory

    def rows_in_split(self, split: str) -> list[DatasetRow]:
        return [row for row in self.rows if row.split == split]

    def accept_proposal(self, proposal: AnnotationProposal) -> DatasetRow:
        row = self.by_id.get(proposal.row_id)
        if row is None:
            raise DatasetError(f"unknown row id {proposal.row_id}")
        with self.lock:
            row.labels = set(proposal.proposed_labels)
            row.split = "train"
        return row


def _hash_key(seed: int, row_id: int) -> bytes:
    return hashlib.sha256(f"{seed}:{row_id}".encode()).digest()


def assign_splits(ids: Iterable[int], seed: int) -> dict[int, str]:
    """Deterministic 80/20 assignment: rank ids by seeded hash, the first
    80% (floor) become train."""
    ordered = sorted(ids, key=lambda i: (_hash_key(seed, i), i))
    n_train = int(len(ordered) * TRAIN_FRACTION)
    return {
        row_id: ("train" if rank < n_train else "val")
        for rank, row_id in enumerate(ordered)
    }


@dataclass
class _RawRow:
    line: int
    text: str
    graph: LabeledGraph
    labels: set[str]
    split: str | None


def _parse_jsonl(text: str, errors: list[LoadError]) -> list[_RawRow]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
            if not isinstance(payload, dict):
                raise DatasetError("row must be a JSON object")
            if "penman" not in payload:
                raise DatasetError("row is missing 'penman'")
            graph = parse_penman(payload["penman"])
            labels = payload.get("labels", [])
            if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
                raise DatasetError("'labels' must be a list of strings")
            split = payload.get("split")
            if split is not None and split not in SPLITS:
                raise DatasetError(f"unknown split {split!r}")
            rows.append(_RawRow(lineno, payload.get("text", ""), graph, set(labels), split))
        except (json.JSONDecodeError, GraphError, DatasetError) as exc:
            errors.append(LoadError(lineno, str(exc)))
    return rows


def _parse_tsv(text: str, errors: list[LoadError]) -> list[_RawRow]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            fields = line.split("\t")
            if len(fields) != 3:
                raise DatasetError(f"expected 3 tab-separated columns, got {len(fields)}")
            row_text, penman, label_field = fields
            graph = parse_penman(penman)
            labels = {part.strip() for part in label_field.split(",") if part.strip()}
            rows.append(_RawRow(lineno, row_text, graph, labels, None))
        except (GraphError, DatasetError) as exc:
            errors.append(LoadError(lineno, str(exc)))
    return rows


def _conllu_blocks(text: str) -> list[tuple[int, str]]:
    blocks = []
    current: list[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            if not current:
                start = lineno
            current.append(line)
        elif current:
            blocks.append((start, "\n".join(current)))
            current = []
    if current:
        blocks.append((start, "\n".join(current)))
    return blocks


def _rooted(graph: LabeledGraph, root: int | None) -> LabeledGraph:
    """Renumber so the dependency root is the lowest node id, which is the
    default serialization root."""
    if root is None or root == min(graph.nodes):
        return graph
    order = [root] + sorted(n for n in graph.nodes if n != root)
    index = {old: new for new, old in enumerate(order)}
    return LabeledGraph(
        {index[n]: label for n, label in graph.nodes.items()},
        {(index[s], index[t], label) for s, t, label in graph.edges},
    )


def _parse_conllu(
    text: str, errors: list[LoadError], sidecar_labels: list[set[str]] | None
) -> list[_RawRow]:
    rows = []
    for ordinal, (start, block) in enumerate(_conllu_blocks(text)):
        labels: set[str] = set()
        if sidecar_labels is not None and ordinal < len(sidecar_labels):
            labels = sidecar_labels[ordinal]
        try:
            sentences = list(iter_conllu(block))
        except GraphError as exc:
            line = start + getattr(exc, "line", 1) - 1
            errors.append(LoadError(line, str(exc)))
            continue
        for sentence in sentences:
            graph = _rooted(sentence.graph, sentence.root)
            rows.append(_RawRow(start, sentence.text or "", graph, set(labels), None))
    return rows


def _read_sidecar(labels_path: str | Path) -> list[set[str]]:
    lines = Path(labels_path).read_text(encoding="utf-8").splitlines()
    return [
        {part.strip() for part in line.split(",") if part.strip()} for line in lines
    ]


def load_dataset(
    path: str | Path,
    fmt: str | None = None,
    *,
    seed: int = 0,
    unlabeled: bool = False,
    labels_path: str | Path | None = None,
) -> Dataset:
    """Load a corpus; `fmt` defaults from the file suffix.

    `unlabeled=True` sends label-less rows to the "unlabeled" split for
    bootstrapping instead of the hashed train/val assignment. CoNLL-U input
    takes labels from `labels_path` (one line per sentence, comma-separated).
    """
    path = Path(path)
    if fmt is None:
        fmt = _SUFFIXES.get(path.suffix.lower())
        if fmt is None:
            raise DatasetError(f"cannot infer format from suffix {path.suffix!r}")
    if fmt not in _FORMATS:
        raise DatasetError(f"unknown format {fmt!r}")
    text = path.read_text(encoding="utf-8")

    errors: list[LoadError] = []
    if fmt == "jsonl":
        raw = _parse_jsonl(text, errors)
    elif fmt == "tsv":
        raw = _parse_tsv(text, errors)
    else:
        sidecar = _read_sidecar(labels_path) if labels_path is not None else None
        raw = _parse_conllu(text, errors, sidecar)

    usable = []
    for entry in raw:
        if not entry.graph.is_connected():
            errors.append(LoadError(entry.line, "graph is not connected"))
            continue
        usable.append(entry)
    if not usable:
        detail = "; ".join(f"line {e.line}: {e.message}" for e in errors[:3])
        raise DatasetError(f"no usable rows in {path}" + (f" ({detail})" if detail else ""))

    rows = []
    pending_ids = []
    for row_id, entry in enumerate(usable):
        split = entry.split
        if split is None and unlabeled and not entry.labels:
            split = "unlabeled"
        if split is None:
            pending_ids.append(row_id)
        rows.append(DatasetRow(row_id, entry.text, entry.graph, entry.labels, split or ""))
    assignment = assign_splits(pending_ids, seed)
    for row_id in pending_ids:
        rows[row_id].split = assignment[row_id]
    return Dataset(rows, errors)


def bootstrap_annotate(system: RuleSystem, dataset: Dataset) -> list[AnnotationProposal]:
    """One proposal per unlabeled row the rule system predicts something
    for, citing every firing rule. Proposals are never auto-applied."""
    proposals = []
    for row in dataset.rows_in_split("unlabeled"):
        predicted = predict(system, row.graph)
        if not predicted:
            continue
        provenance = tuple(
            (label, index)
            for label in system.classes
            for index, rule in enumerate(system.rules_for(label))
            if rule.fires(row.graph)
        )
        proposals.append(AnnotationProposal(row.id, frozenset(predicted), provenance))
    return proposals


def _atomic_write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_version(payload: dict, path: Path) -> None:
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise VersionMismatchError(
            f"{path}: schema_version {version!r} unsupported (expected {SCHEMA_VERSION})"
        )


def save_rules_file(path: str | Path, system: RuleSystem) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **system.to_json_dict()}
    _atomic_write_json(Path(path), payload)


def load_rules_file(path: str | Path) -> RuleSystem:
    path = Path(path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(payload, dict):
        raise DatasetError(f"{path}: rule file must be a JSON object")
    _check_version(payload, path)
    return RuleSystem.from_json_dict(payload)


def save_state(state_dir: str | Path, system: RuleSystem, dataset: Dataset | None = None) -> None:
    """Persist rules.json and, when a dataset is held, annotations.json
    (per-row labels and split). Writes are atomic renames."""
    state_dir = Path(state_dir)
    save_rules_file(state_dir / "rules.json", system)
    if dataset is not None:
        with dataset.lock:
            rows = {
                str(row.id): {"labels": sorted(row.labels), "split": row.split}
                for row in dataset.rows
            }
        _atomic_write_json(
            state_dir / "annotations.json",
            {"schema_version": SCHEMA_VERSION, "rows": rows},
        )


def load_state(state_dir: str | Path, dataset: Dataset | None = None) -> RuleSystem:
    """Load rules.json (empty system if absent) and re-apply persisted
    annotations to the dataset's rows by id."""
    state_dir = Path(state_dir)
    rules_path = state_dir / "rules.json"
    system = load_rules_file(rules_path) if rules_path.exists() else RuleSystem()
    annotations_path = state_dir / "annotations.json"
    if dataset is not None and annotations_path.exists():
        payload = json.loads(annotations_path.read_text(encoding="utf-8"))
        _check_version(payload, annotations_path)
        rows = payload.get("rows", {})
        if not isinstance(rows, dict):
            raise DatasetError(f"{annotations_path}: 'rows' must be an object")
        with dataset.lock:
            for key, entry in rows.items():
                row = dataset.by_id.get(int(key))
                if row is None:
                    continue
                labels = entry.get("labels", [])
                split = entry.get("split")
                if split not in SPLITS:
                    raise DatasetError(f"{annotations_path}: bad split {split!r} for row {key}")
                row.labels = set(labels)
                row.split = split
    return system
