"""
Маска "проходимой" поверхности.

Детекции пешеходов за фазу калибровки накапливаются в пространстве
изображения и во времени: нижняя полоса каждого бокса - это место,
где человек стоит на платформе.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Tuple

import numpy as np

from ..constants import DepthLift
from ..geometry import CameraIntrinsics, backproject_pixels
from ..lifting import BBox2D, DepthMap


logger = logging.getLogger(__name__)


@dataclass
class WalkableMask:
    """
    Накопитель следов детекций.

    Attributes:
        counts: Счётчики по пикселям (height, width)
        threshold: Пиксель проходим при counts >= threshold
        frame_count: Число просмотренных кадров, включая кадры без детекций
        foot_strip_fraction: Доля высоты бокса, считающаяся следом
    """
    counts: np.ndarray
    threshold: int = DepthLift.WALKABLE_THRESHOLD
    frame_count: int = 0
    foot_strip_fraction: float = field(default=DepthLift.FOOT_STRIP_FRACTION)

    @classmethod
    def empty(cls, shape: Tuple[int, int], threshold: int = DepthLift.WALKABLE_THRESHOLD,
              foot_strip_fraction: float = DepthLift.FOOT_STRIP_FRACTION) -> "WalkableMask":
        """Пустая маска формы (height, width)."""
        return cls(
            counts=np.zeros(shape, dtype=np.int64),
            threshold=threshold,
            foot_strip_fraction=foot_strip_fraction,
        )

    @property
    def mask(self) -> np.ndarray:
        """Бинарная маска проходимых пикселей."""
        return self.counts >= self.threshold


def accumulate_walkable(mask: WalkableMask, detections: Iterable[BBox2D]) -> WalkableMask:
    """
    Добавляет детекции одного кадра в маску.

    Инкрементируется нижняя полоса (10% высоты) каждого бокса.
    Кадр без детекций не меняет счётчики, но учитывается в frame_count.
    Маска изменяется на месте и возвращается.
    """
    height, width = mask.counts.shape
    added = 0
    for box in detections:
        u0, v0, w, h = box.pixel_region(width, height)
        strip = max(1, int(math.ceil(h * mask.foot_strip_fraction - 1e-9)))
        mask.counts[v0 + h - strip:v0 + h, u0:u0 + w] += 1
        added += 1

    mask.frame_count += 1
    logger.debug(f"Кадр {mask.frame_count}: добавлено следов {added}")
    return mask


def walkable_points(
    mask: WalkableMask,
    depth: DepthMap,
    intrinsics: CameraIntrinsics,
    use_mask: bool = True,
    stride: int = 1,
) -> np.ndarray:
    """
    3D-точки камеры для валидных пикселей внутри проходимой маски.

    Args:
        use_mask: False - все валидные пиксели (калибровка без маски)
        stride: Шаг прореживания пикселей по обеим осям

    Returns:
        np.ndarray: Точки (N, 3)
    """
    selected = depth.valid.copy()
    if use_mask:
        selected &= mask.mask

    if stride > 1:
        sparse = np.zeros_like(selected)
        sparse[::stride, ::stride] = True
        selected &= sparse

    vs, us = np.nonzero(selected)
    return backproject_pixels(intrinsics, us, vs, depth.depth[vs, us])
