"""
Модуль автокалибровки плоскости платформы.

Маска "проходимой" поверхности по детекциям пешеходов,
RANSAC по глубине внутри маски и проверка априорными знаниями.
"""

from .walkable import WalkableMask, accumulate_walkable, walkable_points
from .ransac import (
    CalibrationError,
    DegenerateInput,
    NoConsensus,
    PlaneRejected,
    RejectReason,
    PlaneFitResult,
    PlaneValidation,
    CalibrationResult,
    fit_ground_plane,
    ransac_plane_fit,
    validate_plane,
    calibrate_ground_plane,
)
from ..config import PlaneFitConfig

__all__ = [
    "WalkableMask",
    "accumulate_walkable",
    "walkable_points",
    "PlaneFitConfig",
    "CalibrationError",
    "DegenerateInput",
    "NoConsensus",
    "PlaneRejected",
    "RejectReason",
    "PlaneFitResult",
    "PlaneValidation",
    "CalibrationResult",
    "fit_ground_plane",
    "ransac_plane_fit",
    "validate_plane",
    "calibrate_ground_plane",
]
