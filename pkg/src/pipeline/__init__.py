"""
Модуль пайплайна.

Граф узлов с кэшированием по содержимому и частичным пересчётом,
перебор и оценка комбинаций источников.
"""

from .graph import (
    PipelineError,
    CycleDetected,
    UnknownNodeKind,
    TooManySources,
    MissingSource,
    NodeExecutionError,
    NodeSpec,
    Graph,
    topo_order,
    execution_waves,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    dump_graph,
)
from .cache import CacheEntry, CacheStore, cache_key, canonical_json, file_digest
from .sweep import (
    CombinationSweep,
    enumerate_combinations,
    gt_objects_from_annotations,
    hypotheses_from_boxes,
    sweep_eval,
)
from .nodes import REGISTRY, NodeKind, copy_artifacts
from .runner import NodeRun, RunResult, compute_keys, run_graph

__all__ = [
    "PipelineError",
    "CycleDetected",
    "UnknownNodeKind",
    "TooManySources",
    "MissingSource",
    "NodeExecutionError",
    "NodeSpec",
    "Graph",
    "topo_order",
    "execution_waves",
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "dump_graph",
    "CacheEntry",
    "CacheStore",
    "cache_key",
    "canonical_json",
    "file_digest",
    "CombinationSweep",
    "enumerate_combinations",
    "gt_objects_from_annotations",
    "hypotheses_from_boxes",
    "sweep_eval",
    "REGISTRY",
    "NodeKind",
    "copy_artifacts",
    "NodeRun",
    "RunResult",
    "compute_keys",
    "run_graph",
]
