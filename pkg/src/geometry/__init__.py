"""
Geometry модуль.

Модель камеры, пересчёт диспаратности в глубину, обратная проекция
и преобразования в систему координат плоскости платформы.
"""

from .camera import (
    CameraIntrinsics,
    StereoRig,
    GeometryError,
    InvalidCameraModel,
    NonPositiveDisparity,
    NonPositiveDepth,
    disparity_to_depth,
    disparity_map_to_depth,
    backproject,
    backproject_pixels,
    project,
    project_points,
)
from .plane import GroundPlane, to_ground_frame, from_ground_frame, plane_from_pose

__all__ = [
    "CameraIntrinsics",
    "StereoRig",
    "GeometryError",
    "InvalidCameraModel",
    "NonPositiveDisparity",
    "NonPositiveDepth",
    "disparity_to_depth",
    "disparity_map_to_depth",
    "backproject",
    "backproject_pixels",
    "project",
    "project_points",
    "GroundPlane",
    "to_ground_frame",
    "from_ground_frame",
    "plane_from_pose",
]
