"""
Оценка глубины объекта внутри 2D-бокса.

Среднее всех измерений внутри бокса смещено фоном, поэтому измерения
взвешиваются 2D-гауссианой с центром в середине бокса и нормируются
суммой весов только валидных пикселей.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .boxes import BBox2D


logger = logging.getLogger(__name__)


class DepthLiftError(Exception):
    """Базовое исключение для подъёма боксов в 3D."""
    pass


class NoValidDepth(DepthLiftError):
    """Внутри бокса нет ни одного валидного пикселя глубины (W_i = 0)."""
    pass


class OutOfBoxCoordinate(DepthLiftError):
    """Координата пикселя вне бокса."""
    pass


@dataclass(frozen=True, eq=False)
class DepthMap:
    """
    Карта глубины с функцией валидности.

    Attributes:
        depth: Глубина d(u, v) в метрах, массив (height, width)
        valid: Валидность phi(u, v), булев массив той же формы
    """
    depth: np.ndarray
    valid: np.ndarray

    def __post_init__(self) -> None:
        if self.depth.shape != self.valid.shape:
            raise ValueError(f"Формы depth {self.depth.shape} и valid {self.valid.shape} не совпадают")
        if np.any(self.valid & ~(self.depth > 0)):
            raise ValueError("Валидные пиксели должны иметь глубину > 0")

    @classmethod
    def from_array(cls, depth: np.ndarray) -> "DepthMap":
        """Карта из массива глубин: пиксели <= 0 или не конечные - невалидны."""
        depth = np.asarray(depth, dtype=np.float64)
        valid = np.isfinite(depth) & (depth > 0)
        return cls(depth=np.where(valid, depth, 0.0), valid=valid)

    @property
    def shape(self):
        return self.depth.shape

    @property
    def height(self) -> int:
        return int(self.depth.shape[0])

    @property
    def width(self) -> int:
        return int(self.depth.shape[1])


@dataclass(frozen=True)
class DepthEstimate:
    """Результат оценки: глубина d_est и нормирующая сумма весов W_i."""
    depth: float
    weight_sum: float


def gaussian_weight(u: float, v: float, w_bb: float, h_bb: float) -> float:
    """
    Вес 2D-гауссианы для пикселя (u, v) внутри бокса w_bb x h_bb.

    Центр (w_bb/2, h_bb/2), сигмы равны размерам бокса.

    Raises:
        OutOfBoxCoordinate: Если (u, v) вне [0, w_bb) x [0, h_bb)
    """
    if not (0 <= u < w_bb and 0 <= v < h_bb):
        raise OutOfBoxCoordinate(f"Пиксель ({u}, {v}) вне бокса {w_bb}x{h_bb}")
    norm = 1.0 / (2.0 * math.pi * math.sqrt(w_bb * h_bb))
    exponent = (u - w_bb / 2.0) ** 2 / (2.0 * w_bb ** 2) + (v - h_bb / 2.0) ** 2 / (2.0 * h_bb ** 2)
    return norm * math.exp(-exponent)


def gaussian_kernel(w_bb: int, h_bb: int) -> np.ndarray:
    """Матрица весов (h_bb, w_bb) для целочисленной сетки бокса."""
    us = np.arange(w_bb, dtype=np.float64)
    vs = np.arange(h_bb, dtype=np.float64)
    norm = 1.0 / (2.0 * np.pi * np.sqrt(float(w_bb) * float(h_bb)))
    eu = (us - w_bb / 2.0) ** 2 / (2.0 * float(w_bb) ** 2)
    ev = (vs - h_bb / 2.0) ** 2 / (2.0 * float(h_bb) ** 2)
    return norm * np.exp(-(ev[:, None] + eu[None, :]))


def estimate_box_depth(depth: DepthMap, box: BBox2D) -> DepthEstimate:
    """
    Оценивает глубину объекта в боксе взвешенным средним валидных пикселей.

    Бокс предварительно обрезается границами изображения.

    Returns:
        DepthEstimate: d_est и W_i

    Raises:
        NoValidDepth: Если все пиксели бокса невалидны
    """
    u0, v0, w, h = box.pixel_region(depth.width, depth.height)
    valid = depth.valid[v0:v0 + h, u0:u0 + w]
    values = np.where(valid, depth.depth[v0:v0 + h, u0:u0 + w], 0.0)

    weights = gaussian_kernel(w, h) * valid
    weight_sum = float(weights.sum())
    if weight_sum <= 0.0:
        raise NoValidDepth(
            f"Нет валидной глубины в боксе ({u0}, {v0}, {w}, {h}) "
            f"источника '{box.source_id}', кадр {box.frame_index}"
        )

    estimate = float((weights * values).sum() / weight_sum)
    # Выпуклая комбинация: d_est в [min, max] валидных глубин
    lo = float(values[valid].min())
    hi = float(values[valid].max())
    return DepthEstimate(depth=min(max(estimate, lo), hi), weight_sum=weight_sum)
