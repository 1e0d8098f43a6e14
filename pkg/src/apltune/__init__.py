"""Tune the average path length of simple graphs while keeping every degree
and clustering coefficient fixed, and study majority-rule dynamics on them."""

__version__ = "0.1.0"

from .generators import WsConfig, ring_lattice, watts_strogatz
from .graph import (
    ClusteringStats,
    Graph,
    GraphError,
    PathStats,
    build_graph,
    clustering_stats,
    common_neighbors,
    edge_in_triangle,
    is_connected,
    path_stats,
    read_edgelist,
    shortest_paths_from,
    write_edgelist,
)
from .majority import MajorityConfig, MajorityRule, StateVector, simulate
from .tuner import AnnealConfig, APLTuner, RewireMove, TuneTrace, tune_apl

__all__ = [
    "APLTuner",
    "AnnealConfig",
    "ClusteringStats",
    "Graph",
    "GraphError",
    "MajorityConfig",
    "MajorityRule",
    "PathStats",
    "RewireMove",
    "StateVector",
    "TuneTrace",
    "WsConfig",
    "build_graph",
    "clustering_stats",
    "common_neighbors",
    "edge_in_triangle",
    "is_connected",
    "path_stats",
    "read_edgelist",
    "ring_lattice",
    "shortest_paths_from",
    "simulate",
    "tune_apl",
    "watts_strogatz",
    "write_edgelist",
]
