"""REST service exposing the rule-building workflow.

Modes: simple (rule editing over a labeled dataset), advanced (adds label
bootstrapping over unlabeled rows), inference (rules file only; every
mutating or dataset-backed endpoint answers 409). Mutations autosave to the
state directory.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, replace

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict, Field

from .datasets import (
    Dataset,
    DatasetError,
    VersionMismatchError,
    bootstrap_annotate,
    load_dataset,
    load_state,
    save_state,
)
from .features import DEFAULT_MAX_EDGES, FeatureTable, build_feature_table
from .graphs import GraphError, PenmanSyntaxError, parse_penman, penman_root, serialize_penman, to_dot
from .learning import NoPositivesError, suggest
from .matching import PatternError, find_mappings
from .refine import DEFAULT_THRESHOLD, RefineError, refine_rule
from .rules import (
    Rule,
    RuleError,
    RuleSystem,
    UnknownClassError,
    UnknownRuleError,
    evaluate,
    predict,
)

MODES = ("simple", "advanced", "inference")
STATE_DIR_ENV = "GRAPHRULES_STATE_DIR"


class ModeForbiddenError(Exception):
    """Endpoint not available in the service's mode."""


@dataclass(frozen=True)
class ServiceConfig:
    mode: str = "simple"
    dataset_path: str | None = None
    dataset_format: str | None = None
    labels_path: str | None = None
    state_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    n_edges: int = DEFAULT_MAX_EDGES
    suggestion_k: int = 10
    refine_threshold: float = DEFAULT_THRESHOLD
    seed: int = 0


class ServiceState:
    """Mutable service core shared by the HTTP handlers.

    Rule mutations and saves go through `lock`; dataset graphs are immutable
    so reads need no coordination.
    """

    def __init__(self, config: ServiceConfig):
        if config.mode not in MODES:
            raise ValueError(f"unknown mode {config.mode!r}")
        state_dir = config.state_dir or os.environ.get(STATE_DIR_ENV)
        if state_dir != config.state_dir:
            config = replace(config, state_dir=state_dir)
        self.config = config
        self.lock = threading.RLock()

        self.dataset: Dataset | None = None
        if config.mode == "inference":
            if not state_dir or not os.path.exists(os.path.join(state_dir, "rules.json")):
                raise ValueError("inference mode requires an existing rules file")
        else:
            if not config.dataset_path:
                raise ValueError(f"{config.mode} mode requires a dataset")
            self.dataset = load_dataset(
                config.dataset_path,
                config.dataset_format,
                seed=config.seed,
                unlabeled=config.mode == "advanced",
                labels_path=config.labels_path,
            )
        self.rules = load_state(state_dir, self.dataset) if state_dir else RuleSystem()
        self._table_key: tuple | None = None
        self._table: FeatureTable | None = None

    def require_mode(self, *allowed: str) -> None:
        if self.config.mode not in allowed:
            raise ModeForbiddenError(
                f"endpoint not available in {self.config.mode} mode"
            )

    def require_dataset(self) -> Dataset:
        if self.dataset is None:
            raise ModeForbiddenError("endpoint requires a dataset (not inference mode)")
        return self.dataset

    def autosave(self) -> None:
        if self.config.state_dir:
            save_state(self.config.state_dir, self.rules, self.dataset)

    def classes(self) -> list[str]:
        inventory = set(self.rules.classes)
        if self.dataset is not None:
            inventory |= self.dataset.label_inventory()
        return sorted(inventory)

    def training_table(self) -> FeatureTable:
        dataset = self.require_dataset()
        rows = dataset.rows_in_split("train")
        key = (self.config.n_edges, tuple(row.id for row in rows))
        with self.lock:
            if key != self._table_key:
                self._table = build_feature_table(
                    [(row.id, row.graph) for row in rows], self.config.n_edges
                )
                self._table_key = key
            return self._table


class RulePayload(BaseModel):
    clauses: list[dict]

    def to_rule(self, class_label: str) -> Rule:
        return Rule.from_json_dict({"clauses": self.clauses}, class_label)


class RulesFilePayload(BaseModel):
    classes: dict[str, list[dict]]

    def to_system(self) -> RuleSystem:
        return RuleSystem.from_json_dict({"classes": self.classes})


class EvaluateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    class_label: str = Field(alias="class")
    split: str = "val"


class SuggestRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    class_label: str = Field(alias="class")
    k: int | None = None
    method: str = "gini"


class RefineRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    class_label: str = Field(alias="class")
    rule_index: int
    clause_index: int = 0
    node: int | None = None
    threshold: float | None = None
    apply: bool = False


class PredictRequest(BaseModel):
    penman: list[str]


def _row_json(row) -> dict:
    return {
        "id": row.id,
        "text": row.text,
        "penman": serialize_penman(row.graph, penman_root(row.graph)),
        "labels": sorted(row.labels),
        "split": row.split,
    }


_ERROR_STATUS = [
    (ModeForbiddenError, 409),
    (UnknownClassError, 404),
    (UnknownRuleError, 404),
    (VersionMismatchError, 400),
    (NoPositivesError, 400),
    (RefineError, 400),
    (RuleError, 400),
    (PatternError, 400),
    (GraphError, 400),
    (DatasetError, 400),
    (ValueError, 400),
]


def create_app(config: ServiceConfig | ServiceState) -> FastAPI:
    state = config if isinstance(config, ServiceState) else ServiceState(config)
    app = FastAPI(title="graphrules", docs_url=None, redoc_url=None)
    app.state.core = state

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        detail = [
            {"loc": [str(part) for part in err.get("loc", ())], "msg": str(err.get("msg", ""))}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.exception_handler(PenmanSyntaxError)
    async def _penman_error(request: Request, exc: PenmanSyntaxError):
        return JSONResponse(
            status_code=400, content={"detail": str(exc), "position": exc.pos}
        )

    def _register(exc_type, status):
        @app.exception_handler(exc_type)
        async def _handler(request: Request, exc, _status=status):
            return JSONResponse(status_code=_status, content={"detail": str(exc)})

    for exc_type, status in _ERROR_STATUS:
        _register(exc_type, status)

    @app.get("/health")
    def health():
        return {"status": "ok", "mode": state.config.mode}

    @app.get("/classes")
    def classes():
        return {"classes": state.classes()}

    @app.get("/rows")
    def rows(
        split: str | None = None,
        class_label: str | None = Query(None, alias="class"),
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=500),
    ):
        dataset = state.require_dataset()
        selected = dataset.rows
        if split is not None:
            selected = [row for row in selected if row.split == split]
        if class_label is not None:
            selected = [row for row in selected if class_label in row.labels]
        total = len(selected)
        start = (page - 1) * page_size
        page_rows = selected[start : start + page_size]
        return {
            "rows": [_row_json(row) for row in page_rows],
            "page": page,
            "page_size": page_size,
            "total": total,
            "total_pages": math.ceil(total / page_size) if total else 0,
        }

    @app.get("/rows/{row_id}/dot", response_class=PlainTextResponse)
    def row_dot(
        row_id: int,
        class_label: str | None = Query(None, alias="class"),
        rule_index: int | None = Query(None, alias="rule"),
    ):
        dataset = state.require_dataset()
        row = dataset.by_id.get(row_id)
        if row is None:
            return JSONResponse(status_code=404, content={"detail": f"no row {row_id}"})
        highlight: set[int] = set()
        if class_label is not None and rule_index is not None:
            rules = state.rules.rules_for(class_label)
            if class_label not in state.rules.classes:
                raise UnknownClassError(f"no rules for class {class_label!r}")
            if not 0 <= rule_index < len(rules):
                raise UnknownRuleError(f"rule index {rule_index} out of range")
            for clause in rules[rule_index].clauses:
                if clause.negated:
                    continue
                mappings = find_mappings(clause.pattern, row.graph, limit=1)
                if mappings:
                    highlight.update(mappings[0].values())
        return to_dot(row.graph, highlight=highlight)

    @app.get("/rules")
    def get_rules():
        return state.rules.to_json_dict()

    @app.put("/rules")
    def put_rules(payload: RulesFilePayload):
        state.require_mode("simple", "advanced")
        with state.lock:
            state.rules = payload.to_system()
            state.autosave()
        return state.rules.to_json_dict()

    @app.post("/rules/{class_label}")
    def post_rule(class_label: str, payload: RulePayload):
        state.require_mode("simple", "advanced")
        rule = payload.to_rule(class_label)
        with state.lock:
            state.rules = state.rules.with_rule(rule)
            index = len(state.rules.rules_for(class_label)) - 1
            state.autosave()
        return {"class": class_label, "index": index, **state.rules.to_json_dict()}

    @app.delete("/rules/{class_label}/{index}")
    def delete_rule(class_label: str, index: int):
        state.require_mode("simple", "advanced")
        with state.lock:
            state.rules = state.rules.without_rule(class_label, index)
            state.autosave()
        return state.rules.to_json_dict()

    @app.post("/evaluate")
    def post_evaluate(payload: EvaluateRequest):
        dataset = state.require_dataset()
        report = evaluate(state.rules, dataset, payload.class_label, payload.split)
        return report.to_json_dict()

    @app.post("/suggest")
    def post_suggest(payload: SuggestRequest):
        state.require_mode("simple", "advanced")
        dataset = state.require_dataset()
        method = payload.method.replace("-", "_")
        if method == "tpfp":
            method = "tp_fp"
        k = payload.k if payload.k is not None else state.config.suggestion_k
        table = state.training_table()
        suggestions = suggest(
            dataset, payload.class_label, k, method,
            n_edges=state.config.n_edges, table=table,
        )
        return {
            "class": payload.class_label,
            "method": method,
            "suggestions": [s.to_json_dict() for s in suggestions],
        }

    @app.post("/refine")
    def post_refine(payload: RefineRequest):
        state.require_mode("simple", "advanced")
        dataset = state.require_dataset()
        rules = state.rules.rules_for(payload.class_label)
        if payload.class_label not in state.rules.classes:
            raise UnknownClassError(f"no rules for class {payload.class_label!r}")
        if not 0 <= payload.rule_index < len(rules):
            raise UnknownRuleError(f"rule index {payload.rule_index} out of range")
        threshold = (
            payload.threshold
            if payload.threshold is not None
            else state.config.refine_threshold
        )
        new_rule, result = refine_rule(
            rules[payload.rule_index],
            payload.clause_index,
            payload.node,
            dataset,
            payload.class_label,
            threshold,
        )
        if payload.apply:
            with state.lock:
                state.rules = state.rules.with_replaced_rule(payload.rule_index, new_rule)
                state.autosave()
        return {
            "class": payload.class_label,
            "rule_index": payload.rule_index,
            "clause_index": payload.clause_index,
            "threshold": threshold,
            "applied": payload.apply,
            "rule": new_rule.to_json_dict()["clauses"],
            **result.to_json_dict(),
        }

    @app.post("/predict")
    def post_predict(payload: PredictRequest):
        graphs = [parse_penman(text) for text in payload.penman]
        return [sorted(predict(state.rules, graph)) for graph in graphs]

    @app.post("/proposals")
    def post_proposals():
        state.require_mode("advanced")
        dataset = state.require_dataset()
        proposals = bootstrap_annotate(state.rules, dataset)
        return {
            "proposals": [
                {
                    "row_id": p.row_id,
                    "labels": sorted(p.proposed_labels),
                    "provenance": [
                        {"class": label, "rule_index": index}
                        for label, index in p.provenance
                    ],
                }
                for p in proposals
            ]
        }

    @app.post("/proposals/{row_id}/accept")
    def accept_proposal(row_id: int):
        state.require_mode("advanced")
        dataset = state.require_dataset()
        row = dataset.by_id.get(row_id)
        if row is None:
            return JSONResponse(status_code=404, content={"detail": f"no row {row_id}"})
        matching = [p for p in bootstrap_annotate(state.rules, dataset) if p.row_id == row_id]
        if not matching:
            return JSONResponse(
                status_code=404, content={"detail": f"no proposal for row {row_id}"}
            )
        with state.lock:
            dataset.accept_proposal(matching[0])
            state.autosave()
        return {"row_id": row_id, "labels": sorted(row.labels), "split": row.split}

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
