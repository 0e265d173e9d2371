"""Multilevel exploration of numeric and temporal data over aggregation trees.

Builds fixed-size or fixed-range hierarchies over flat value lists,
aggregates statistics per group, supports drill-down/roll-up exploration
from three kinds of starting points, grows trees incrementally as the
user navigates, and reshapes existing trees to new parameters while
reusing nodes and statistics.
"""

from .adaptive import AdaptationCase, AdaptationReport, adapt, classify
from .counters import BuildCounters
from .explore import ExplorationSession, RenderedSet, StartingPoint, current_view, drill_down, roll_up, start_session
from .incremental import IcoState, ico_init
from .ingest import DataObject, Dataset, parse_csv, parse_ntriples, serialize_csv, sort_dataset
from .params import CandidateSetting, VisBounds, enumerate_candidates, estimate_params, leaf_bounds, select_setting
from .stats import NodeStats, merge_stats, stats_from_values
from .tree import HETree, Interval, Node, TreeParams, build_hetree, build_hetree_c, build_hetree_r, constr_internal_nodes

__all__ = [
    "AdaptationCase",
    "AdaptationReport",
    "BuildCounters",
    "CandidateSetting",
    "DataObject",
    "Dataset",
    "ExplorationSession",
    "HETree",
    "IcoState",
    "Interval",
    "Node",
    "NodeStats",
    "RenderedSet",
    "StartingPoint",
    "TreeParams",
    "VisBounds",
    "adapt",
    "build_hetree",
    "build_hetree_c",
    "build_hetree_r",
    "classify",
    "constr_internal_nodes",
    "current_view",
    "drill_down",
    "enumerate_candidates",
    "estimate_params",
    "ico_init",
    "leaf_bounds",
    "merge_stats",
    "parse_csv",
    "parse_ntriples",
    "roll_up",
    "select_setting",
    "serialize_csv",
    "sort_dataset",
    "start_session",
    "stats_from_values",
]

__version__ = "0.1.0"
