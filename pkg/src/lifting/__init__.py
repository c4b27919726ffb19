"""
Модуль подъёма 2D-детекций в 3D.

Гауссово-взвешенная оценка глубины в боксе и построение 3D-боксов
на калиброванной плоскости платформы.
"""

from .boxes import BBox2D, BBox3D, ClassLabel
from .depth import (
    DepthMap,
    DepthEstimate,
    DepthLiftError,
    NoValidDepth,
    OutOfBoxCoordinate,
    gaussian_weight,
    gaussian_kernel,
    estimate_box_depth,
)
from .lifter import lift_bbox, lift_detections, project_bbox3d

__all__ = [
    "BBox2D",
    "BBox3D",
    "ClassLabel",
    "DepthMap",
    "DepthEstimate",
    "DepthLiftError",
    "NoValidDepth",
    "OutOfBoxCoordinate",
    "gaussian_weight",
    "gaussian_kernel",
    "estimate_box_depth",
    "lift_bbox",
    "lift_detections",
    "project_bbox3d",
]
