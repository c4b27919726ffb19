"""
Модуль фьюжна треков нескольких источников.

Перекрытие 3D-боксов (IoU/IoE), менеджер треклетов и отчёт
о нарушении линии безопасности.
"""

from .overlap import (
    FusionError,
    UnsupportedYaw,
    OutOfOrderFrame,
    intersection_volume,
    overlap_3d,
    iou_3d,
    ioe_3d,
)
from .tracklet_manager import (
    Detection3D,
    Tracklet,
    TrackletManager,
    already_in_history,
    fuse_observation,
    fuse_frame,
    fuse_sequence,
)
from .safety import DangerSide, SafetyLine, SafetyViolation, safety_report

__all__ = [
    "FusionError",
    "UnsupportedYaw",
    "OutOfOrderFrame",
    "intersection_volume",
    "overlap_3d",
    "iou_3d",
    "ioe_3d",
    "Detection3D",
    "Tracklet",
    "TrackletManager",
    "already_in_history",
    "fuse_observation",
    "fuse_frame",
    "fuse_sequence",
    "DangerSide",
    "SafetyLine",
    "SafetyViolation",
    "safety_report",
]
