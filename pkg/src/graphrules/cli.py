"""Command-line entry points: serve, predict, evaluate, suggest, refine,
convert. Exit codes: 0 success, 1 usage error, 2 data error. Results are
printed as JSON on stdout; diagnostics go to stderr."""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from .datasets import DatasetError, load_dataset, load_rules_file, save_rules_file
from .graphs import GraphError, parse_penman, penman_root, serialize_penman
from .learning import DegenerateLabelsError, NoPositivesError, suggest
from .matching import PatternError
from .refine import RefineError, refine_rule
from .rules import RuleError, evaluate, predict
from .service import ServiceConfig, serve

_DATA_ERRORS = (
    GraphError,
    PatternError,
    RuleError,
    RefineError,
    DatasetError,
    NoPositivesError,
    DegenerateLabelsError,
    ValueError,
    OSError,
    json.JSONDecodeError,
)


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default is 2, which we reserve
    # for data errors
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True, help="corpus file (jsonl/tsv/conllu)")
    parser.add_argument("--format", choices=["jsonl", "tsv", "conllu"], default=None)
    parser.add_argument("--labels", default=None, help="sidecar labels file for conllu")
    parser.add_argument("--seed", type=int, default=0, help="train/val split seed")


def _build_parser() -> _Parser:
    parser = _Parser(prog="graphrules")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the REST service")
    p.add_argument("--mode", choices=["simple", "advanced", "inference"], default="simple")
    p.add_argument("--dataset", default=None)
    p.add_argument("--format", choices=["jsonl", "tsv", "conllu"], default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--state-dir", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--n-edges", type=int, default=2)
    p.add_argument("--suggestion-k", type=int, default=10)
    p.add_argument("--refine-threshold", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("predict", help="label PENMAN graphs with a rule file")
    p.add_argument("--rules", required=True)
    p.add_argument("--input", required=True, help="jsonl with a 'penman' field per row")
    p.add_argument("--output", default=None, help="output jsonl (default stdout)")

    p = sub.add_parser("evaluate", help="score one class's rules on a split")
    p.add_argument("--rules", required=True)
    _add_dataset_args(p)
    p.add_argument("--class", dest="class_label", required=True)
    p.add_argument("--split", choices=["train", "val"], default="val")

    p = sub.add_parser("suggest", help="rank candidate patterns for a class")
    _add_dataset_args(p)
    p.add_argument("--class", dest="class_label", required=True)
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--method", choices=["gini", "tpfp", "tp_fp"], default="gini")
    p.add_argument("--n-edges", type=int, default=2)

    p = sub.add_parser("refine", help="specialize a regex node of a rule clause")
    p.add_argument("--rules", required=True)
    _add_dataset_args(p)
    p.add_argument("--class", dest="class_label", required=True)
    p.add_argument("--rule-index", type=int, required=True)
    p.add_argument("--clause-index", type=int, default=0)
    p.add_argument("--node", type=int, default=None)
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--output", default=None, help="write the updated rule file here")

    p = sub.add_parser("convert", help="convert a corpus between formats")
    p.add_argument("--from", dest="from_format", choices=["jsonl", "tsv", "conllu"], required=True)
    p.add_argument("--to", dest="to_format", choices=["jsonl", "tsv"], required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None, help="output file (default stdout)")
    p.add_argument("--labels", default=None)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _print_json(payload) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_predict(args) -> int:
    system = load_rules_file(args.rules)
    lines = []
    for lineno, line in enumerate(
        Path(args.input).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            graph = parse_penman(row["penman"])
        except (json.JSONDecodeError, KeyError, TypeError, GraphError) as exc:
            print(f"{args.input}:{lineno}: {exc}", file=sys.stderr)
            return 2
        lines.append(json.dumps({"labels": sorted(predict(system, graph))}))
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def _load_cli_dataset(args):
    dataset = load_dataset(
        args.dataset, args.format, seed=args.seed, labels_path=args.labels
    )
    for err in dataset.load_errors:
        print(f"{args.dataset}:{err.line}: {err.message}", file=sys.stderr)
    return dataset


def _cmd_evaluate(args) -> int:
    system = load_rules_file(args.rules)
    dataset = _load_cli_dataset(args)
    report = evaluate(system, dataset, args.class_label, args.split)
    _print_json(report.to_json_dict())
    return 0


def _cmd_suggest(args) -> int:
    dataset = _load_cli_dataset(args)
    method = "tp_fp" if args.method in ("tpfp", "tp_fp") else args.method
    suggestions = suggest(dataset, args.class_label, args.k, method, n_edges=args.n_edges)
    _print_json(
        {
            "class": args.class_label,
            "method": method,
            "suggestions": [s.to_json_dict() for s in suggestions],
        }
    )
    return 0


def _cmd_refine(args) -> int:
    system = load_rules_file(args.rules)
    dataset = _load_cli_dataset(args)
    rules = system.rules_for(args.class_label)
    if not rules:
        raise RuleError(f"no rules for class {args.class_label!r}")
    if not 0 <= args.rule_index < len(rules):
        raise RuleError(f"rule index {args.rule_index} out of range")
    new_rule, result = refine_rule(
        rules[args.rule_index],
        args.clause_index,
        args.node,
        dataset,
        args.class_label,
        args.threshold,
    )
    if args.output is not None:
        save_rules_file(args.output, system.with_replaced_rule(args.rule_index, new_rule))
    _print_json(
        {
            "class": args.class_label,
            "rule_index": args.rule_index,
            "rule": new_rule.to_json_dict()["clauses"],
            **result.to_json_dict(),
        }
    )
    return 0


def _cmd_convert(args) -> int:
    dataset = load_dataset(args.input, args.from_format, labels_path=args.labels)
    for err in dataset.load_errors:
        print(f"{args.input}:{err.line}: {err.message}", file=sys.stderr)
    out_lines = []
    for row in dataset.rows:
        penman = serialize_penman(row.graph, penman_root(row.graph))
        if args.to_format == "jsonl":
            out_lines.append(
                json.dumps(
                    {"text": row.text, "penman": penman, "labels": sorted(row.labels)}
                )
            )
        else:
            # TSV cannot carry tabs/newlines in the text column
            text = " ".join(row.text.split())
            out_lines.append(f"{text}\t{penman}\t{','.join(sorted(row.labels))}")
    _emit("".join(line + "\n" for line in out_lines), args.output)
    return 0


def _cmd_serve(args) -> int:
    config = ServiceConfig(
        mode=args.mode,
        dataset_path=args.dataset,
        dataset_format=args.format,
        labels_path=args.labels,
        state_dir=args.state_dir,
        host=args.host,
        port=args.port,
        n_edges=args.n_edges,
        suggestion_k=args.suggestion_k,
        refine_threshold=args.refine_threshold,
        seed=args.seed,
    )
    serve(config)
    return 0


_COMMANDS = {
    "serve": _cmd_serve,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "suggest": _cmd_suggest,
    "refine": _cmd_refine,
    "convert": _cmd_convert,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse raises for usage errors and --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _DATA_ERRORS as exc:
        print(f"graphrules {args.command}: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())
