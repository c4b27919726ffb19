"""
Модуль 3D-трекинга по карте занятости.

Карта занятости на плоскости платформы, кластеризация,
фильтр Калмана и венгерское сопоставление.
"""

from .occupancy import OccupancyGrid, Cluster, build_occupancy, cluster_occupancy
from .kalman import (
    TrackingError,
    InvalidTrackState,
    InvalidTransition,
    TrackStatus,
    TrackState,
    initiate_track,
    transition_matrix,
    kalman_predict,
    kalman_update,
)
from .association import Assignment, associate_hungarian
from .tracker import StepResult, OccupancyTracker, step_tracker, track_to_box, track_sequence

__all__ = [
    "OccupancyGrid",
    "Cluster",
    "build_occupancy",
    "cluster_occupancy",
    "TrackingError",
    "InvalidTrackState",
    "InvalidTransition",
    "TrackStatus",
    "TrackState",
    "initiate_track",
    "transition_matrix",
    "kalman_predict",
    "kalman_update",
    "Assignment",
    "associate_hungarian",
    "StepResult",
    "OccupancyTracker",
    "step_tracker",
    "track_to_box",
    "track_sequence",
]
