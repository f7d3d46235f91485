"""Exact length-bounded simple-path counting on undirected graphs."""

from .btcount import bfs_distances, count_paths_bt, count_paths_bt_all
from .dispatch import SolveConfig, extract_features, select_algorithm, solve
from .fbs import compute_edge_order, count_by_length, count_paths_fbs, frontier_sequence
from .instance import Graph, Instance, Kind, parse_instance, serialize_instance, validate

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Instance",
    "Kind",
    "SolveConfig",
    "bfs_distances",
    "compute_edge_order",
    "count_by_length",
    "count_paths_bt",
    "count_paths_bt_all",
    "count_paths_fbs",
    "extract_features",
    "frontier_sequence",
    "parse_instance",
    "select_algorithm",
    "serialize_instance",
    "solve",
    "validate",
]
