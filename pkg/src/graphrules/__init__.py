"""Human-in-the-loop rule-based text classification over directed labeled
graphs: PENMAN/CoNLL-U ingestion, regex-labeled subgraph matching, DNF rule
systems, feature suggestion, and regex refinement."""

from .datasets import (
    AnnotationProposal,
    Dataset,
    DatasetError,
    DatasetRow,
    bootstrap_annotate,
    load_dataset,
    load_rules_file,
    load_state,
    save_rules_file,
    save_state,
)
from .features import (
    FeatureCatalog,
    FeatureTable,
    build_feature_table,
    canonical_form,
    enumerate_subgraphs,
)
from .graphs import (
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
from .learning import DecisionTree, Suggestion, rank_features, suggest, train_tree
from .matching import MatchMapping, Pattern, PatternError, find_mappings, is_regex_label, matches
from .refine import RefinementResult, refine_pattern, refine_rule
from .rules import Clause, EvalReport, Rule, RuleError, RuleSystem, evaluate, predict
from .service import ServiceConfig, create_app, serve

__version__ = "0.1.0"

__all__ = [
    "AnnotationProposal",
    "Clause",
    "ConlluError",
    "Dataset",
    "DatasetError",
    "DatasetRow",
    "DecisionTree",
    "EvalReport",
    "FeatureCatalog",
    "FeatureTable",
    "GraphError",
    "LabeledGraph",
    "MatchMapping",
    "Pattern",
    "PatternError",
    "PenmanSyntaxError",
    "RefinementResult",
    "Rule",
    "RuleError",
    "RuleSystem",
    "ServiceConfig",
    "Suggestion",
    "bootstrap_annotate",
    "build_feature_table",
    "canonical_form",
    "create_app",
    "enumerate_subgraphs",
    "evaluate",
    "find_mappings",
    "is_regex_label",
    "load_dataset",
    "load_rules_file",
    "load_state",
    "matches",
    "parse_conllu",
    "parse_penman",
    "penman_root",
    "predict",
    "rank_features",
    "refine_pattern",
    "refine_rule",
    "save_rules_file",
    "save_state",
    "serialize_penman",
    "serve",
    "suggest",
    "to_dot",
    "train_tree",
]
