"""
Модуль метрик MOT: CLEAR-MOT, ID-метрики и покрытие.
"""

from .accumulator import (
    MetricsError,
    EmptyGroundTruth,
    NoMatches,
    MatchMode,
    GtObject,
    FrameMatch,
    iou_matrix,
    cost_matrix,
    match_frame,
    MetricsAccumulator,
)
from .report import (
    TaskSetting,
    Hypothesis,
    CoverageStats,
    MetricsReport,
    compute_mota,
    compute_motp,
    compute_id_metrics,
    compute_coverage,
    summarize,
    filter_ground_truth,
    evaluate_sequence,
    write_reports,
)

__all__ = [
    "MetricsError",
    "EmptyGroundTruth",
    "NoMatches",
    "MatchMode",
    "GtObject",
    "FrameMatch",
    "iou_matrix",
    "cost_matrix",
    "match_frame",
    "MetricsAccumulator",
    "TaskSetting",
    "Hypothesis",
    "CoverageStats",
    "MetricsReport",
    "compute_mota",
    "compute_motp",
    "compute_id_metrics",
    "compute_coverage",
    "summarize",
    "filter_ground_truth",
    "evaluate_sequence",
    "write_reports",
]
