"""
Подъём 2D-боксов в 3D-боксы на плоскости платформы и обратная проекция
3D-боксов в изображение.
"""

import logging
from typing import Iterable, List, Tuple

import numpy as np

from ..geometry import (
    CameraIntrinsics,
    GroundPlane,
    NonPositiveDepth,
    backproject,
    from_ground_frame,
    project_points,
    to_ground_frame,
)
from .boxes import BBox2D, BBox3D
from .depth import DepthMap, NoValidDepth, estimate_box_depth


logger = logging.getLogger(__name__)


def lift_bbox(
    box: BBox2D,
    d_est: float,
    intrinsics: CameraIntrinsics,
    plane: GroundPlane,
) -> BBox3D:
    """
    Строит 3D-бокс по 2D-боксу и оценённой глубине.

    d_est - расстояние до обращённой к камере поверхности объекта, поэтому
    центр сдвигается вдоль луча на половину глубины. Глубина объекта
    принимается равной его ширине.

    Args:
        box: 2D-бокс
        d_est: Оценка глубины (м)
        intrinsics: Параметры камеры
        plane: Калиброванная плоскость

    Returns:
        BBox3D: Бокс в системе плоскости, yaw = 0

    Raises:
        NonPositiveDepth: Если d_est <= 0
    """
    if not d_est > 0:
        raise NonPositiveDepth(f"d_est должна быть > 0, получено {d_est}")

    width = box.w_bb * d_est / intrinsics.fx
    height = box.h_bb * d_est / intrinsics.fy
    depth = width

    u, v = box.center
    surface_point = backproject(intrinsics, u, v, d_est)
    ray = surface_point / np.linalg.norm(surface_point)
    center_camera = surface_point + ray * (depth / 2.0)
    center = to_ground_frame(plane, center_camera)

    return BBox3D(
        center=(float(center[0]), float(center[1]), float(center[2])),
        extent=(float(width), float(height), float(depth)),
        yaw=0.0,
        confidence=box.confidence,
        source_id=box.source_id,
        track_id=box.track_id,
        frame_index=box.frame_index,
        class_label=box.class_label,
    )


def lift_detections(
    boxes: Iterable[BBox2D],
    depth: DepthMap,
    intrinsics: CameraIntrinsics,
    plane: GroundPlane,
) -> List[BBox3D]:
    """
    Поднимает все боксы одного кадра.

    Боксы без валидной глубины пропускаются.
    """
    lifted: List[BBox3D] = []
    skipped = 0
    for box in boxes:
        clamped = box.clamp(intrinsics.width, intrinsics.height)
        try:
            estimate = estimate_box_depth(depth, clamped)
        except NoValidDepth as e:
            skipped += 1
            logger.debug(f"Бокс пропущен: {e}")
            continue
        lifted.append(lift_bbox(clamped, estimate.depth, intrinsics, plane))

    if skipped:
        logger.warning(f"Пропущено боксов без валидной глубины: {skipped}")
    return lifted


def project_bbox3d(
    box: BBox3D,
    intrinsics: CameraIntrinsics,
    plane: GroundPlane,
) -> Tuple[float, float, float, float]:
    """
    Проецирует 3D-бокс в изображение.

    Returns:
        Tuple: (left, top, width, height) описанного прямоугольника вершин,
            обрезанного границами изображения

    Raises:
        NonPositiveDepth: Если часть бокса за камерой
    """
    corners = from_ground_frame(plane, box.corners())
    pixels = project_points(intrinsics, corners)
    left = float(np.clip(pixels[:, 0].min(), 0.0, intrinsics.width - 1.0))
    top = float(np.clip(pixels[:, 1].min(), 0.0, intrinsics.height - 1.0))
    right = float(np.clip(pixels[:, 0].max(), left + 1.0, intrinsics.width))
    bottom = float(np.clip(pixels[:, 1].max(), top + 1.0, intrinsics.height))
    return (left, top, right - left, bottom - top)
