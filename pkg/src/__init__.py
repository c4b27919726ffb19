"""
fusemot - 3D-подъём, фьюжн и оценка результатов многообъектного трекинга.

Этот модуль предоставляет компоненты для калибровки плоскости платформы,
подъёма 2D-треков в 3D по карте глубины, 3D-трекинга по карте занятости,
фьюжна треклетов нескольких источников и оценки метриками MOT
в кэшируемом пайплайне.
"""

from .config import Config, get_config, reset_config

# Geometry module
from .geometry import CameraIntrinsics, StereoRig, GroundPlane

# Lifting module
from .lifting import BBox2D, BBox3D, DepthMap, lift_bbox, estimate_box_depth

# Calibration module
from .calibration import calibrate_ground_plane, ransac_plane_fit

# Tracking module
from .tracking import OccupancyTracker, track_sequence

# Fusion module
from .fusion import TrackletManager, fuse_frame, fuse_sequence, safety_report

# Metrics module
from .metrics import MetricsAccumulator, evaluate_sequence

# Pipeline module
from .pipeline import CacheStore, Graph, run_graph, sweep_eval

# UI module
from .ui import CLI

__version__ = "1.0.0"
__all__ = [
    # Config
    "Config",
    "get_config",
    "reset_config",
    # Geometry
    "CameraIntrinsics",
    "StereoRig",
    "GroundPlane",
    # Lifting
    "BBox2D",
    "BBox3D",
    "DepthMap",
    "lift_bbox",
    "estimate_box_depth",
    # Calibration
    "calibrate_ground_plane",
    "ransac_plane_fit",
    # Tracking
    "OccupancyTracker",
    "track_sequence",
    # Fusion
    "TrackletManager",
    "fuse_frame",
    "fuse_sequence",
    "safety_report",
    # Metrics
    "MetricsAccumulator",
    "evaluate_sequence",
    # Pipeline
    "CacheStore",
    "Graph",
    "run_graph",
    "sweep_eval",
    # UI
    "CLI",
]
