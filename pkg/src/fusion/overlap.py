"""
Перекрытие 3D-боксов, выровненных по осям плоскости: IoU и IoE.
"""

import math
from typing import Tuple

import numpy as np

from ..lifting import BBox3D


class FusionError(Exception):
    """Базовое исключение для фьюжна треков."""
    pass


class UnsupportedYaw(FusionError):
    """Повёрнутые боксы не поддерживаются."""
    pass


class OutOfOrderFrame(FusionError):
    """Кадр меньше текущего кадра менеджера."""
    pass


def _check_yaw(*boxes: BBox3D) -> None:
    for box in boxes:
        if not math.isclose(box.yaw, 0.0, abs_tol=1e-12):
            raise UnsupportedYaw(f"Бокс с yaw={box.yaw} рад не выровнен по осям плоскости")


def intersection_volume(a: BBox3D, b: BBox3D) -> float:
    """Объём пересечения двух выровненных боксов."""
    _check_yaw(a, b)
    lo = np.maximum(a.min_corner, b.min_corner)
    hi = np.minimum(a.max_corner, b.max_corner)
    return float(np.prod(np.clip(hi - lo, 0.0, None)))


def overlap_3d(a: BBox3D, b: BBox3D) -> Tuple[float, float]:
    """(IoU, IoE) за одно вычисление пересечения."""
    inter = intersection_volume(a, b)
    if inter <= 0.0:
        return 0.0, 0.0
    union = a.volume + b.volume - inter
    iou = min(1.0, inter / union)
    ioe = min(1.0, inter / min(a.volume, b.volume))
    return iou, ioe


def iou_3d(a: BBox3D, b: BBox3D) -> float:
    """
    Объём пересечения / объём объединения.

    Raises:
        UnsupportedYaw: Если yaw != 0
    """
    return overlap_3d(a, b)[0]


def ioe_3d(a: BBox3D, b: BBox3D) -> float:
    """
    Объём пересечения / объём меньшего бокса.

    Равно 1 ровно тогда, когда меньший бокс целиком внутри большего.

    Raises:
        UnsupportedYaw: Если yaw != 0
    """
    return overlap_3d(a, b)[1]
