"""
Модель камеры: пинхол, стереобаза, пересчёт диспаратности в глубину,
обратная проекция пикселей в 3D.

Система координат камеры: правая, z вперёд, y вниз. Все расстояния в метрах.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np


logger = logging.getLogger(__name__)


class GeometryError(Exception):
    """Базовое исключение для геометрических ошибок."""
    pass


class InvalidCameraModel(GeometryError):
    """Параметры камеры нарушают инварианты."""
    pass


class NonPositiveDisparity(GeometryError):
    """Диспаратность <= 0 - невалидное стерео-соответствие."""
    pass


class NonPositiveDepth(GeometryError):
    """Глубина <= 0."""
    pass


@dataclass(frozen=True)
class CameraIntrinsics:
    """
    Внутренние параметры пинхол-камеры.

    Attributes:
        fx, fy: Фокусные расстояния в пикселях
        cx, cy: Главная точка в пикселях
        width, height: Размер изображения в пикселях
    """
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidCameraModel(f"Фокусные расстояния должны быть > 0: fx={self.fx}, fy={self.fy}")
        if self.width <= 0 or self.height <= 0:
            raise InvalidCameraModel(f"Некорректный размер изображения: {self.width}x{self.height}")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise InvalidCameraModel(
                f"Главная точка ({self.cx}, {self.cy}) вне изображения {self.width}x{self.height}"
            )

    @property
    def matrix(self) -> np.ndarray:
        """Матрица K 3x3."""
        return np.array([
            [self.fx, 0.0, self.cx],
            [0.0, self.fy, self.cy],
            [0.0, 0.0, 1.0],
        ])

    @property
    def shape(self) -> Tuple[int, int]:
        """Форма массива изображения (height, width)."""
        return (self.height, self.width)


@dataclass(frozen=True)
class StereoRig:
    """
    Стереоустановка: камера и база между камерами.

    Attributes:
        intrinsics: Параметры (ректифицированной) левой камеры
        baseline: База в метрах
    """
    intrinsics: CameraIntrinsics
    baseline: float

    def __post_init__(self) -> None:
        if self.baseline <= 0:
            raise InvalidCameraModel(f"База должна быть > 0, получено {self.baseline}")


def disparity_to_depth(rig: StereoRig, disparity: float) -> float:
    """
    Пересчитывает диспаратность в глубину: d = fx * baseline / disparity.

    Raises:
        NonPositiveDisparity: Если disparity <= 0
    """
    if not disparity > 0:
        raise NonPositiveDisparity(f"Диспаратность должна быть > 0, получено {disparity}")
    return rig.intrinsics.fx * rig.baseline / float(disparity)


def disparity_map_to_depth(rig: StereoRig, disparity: np.ndarray) -> "DepthMap":
    """
    Векторный пересчёт карты диспаратности в карту глубины.

    Пиксели с диспаратностью <= 0 (или не конечной) становятся невалидными,
    исключение не бросается.
    """
    from ..lifting.depth import DepthMap

    disparity = np.asarray(disparity, dtype=np.float64)
    valid = np.isfinite(disparity) & (disparity > 0)
    depth = np.zeros_like(disparity)
    depth[valid] = rig.intrinsics.fx * rig.baseline / disparity[valid]
    return DepthMap(depth=depth, valid=valid)


def backproject(intrinsics: CameraIntrinsics, u: float, v: float, depth: float) -> np.ndarray:
    """
    Обратная проекция пикселя (u, v) на глубине depth.

    Returns:
        np.ndarray: Точка (X, Y, Z) в системе камеры

    Raises:
        NonPositiveDepth: Если depth <= 0
    """
    if not depth > 0:
        raise NonPositiveDepth(f"Глубина должна быть > 0, получено {depth}")
    return np.array([
        (u - intrinsics.cx) / intrinsics.fx * depth,
        (v - intrinsics.cy) / intrinsics.fy * depth,
        float(depth),
    ])


def backproject_pixels(
    intrinsics: CameraIntrinsics,
    us: np.ndarray,
    vs: np.ndarray,
    depths: np.ndarray,
) -> np.ndarray:
    """Векторная обратная проекция, возвращает массив (N, 3)."""
    depths = np.asarray(depths, dtype=np.float64)
    xs = (np.asarray(us, dtype=np.float64) - intrinsics.cx) / intrinsics.fx * depths
    ys = (np.asarray(vs, dtype=np.float64) - intrinsics.cy) / intrinsics.fy * depths
    return np.stack([xs, ys, depths], axis=-1)


def project(intrinsics: CameraIntrinsics, point: np.ndarray) -> Tuple[float, float]:
    """
    Проекция точки камеры на изображение.

    Raises:
        NonPositiveDepth: Если точка за камерой (z <= 0)
    """
    x, y, z = (float(c) for c in point)
    if not z > 0:
        raise NonPositiveDepth(f"Точка за камерой: z={z}")
    return (intrinsics.fx * x / z + intrinsics.cx, intrinsics.fy * y / z + intrinsics.cy)


def project_points(intrinsics: CameraIntrinsics, points: np.ndarray) -> np.ndarray:
    """Векторная проекция (N, 3) -> (N, 2). Точки должны иметь z > 0."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if np.any(points[:, 2] <= 0):
        raise NonPositiveDepth("Есть точки за камерой")
    us = intrinsics.fx * points[:, 0] / points[:, 2] + intrinsics.cx
    vs = intrinsics.fy * points[:, 1] / points[:, 2] + intrinsics.cy
    return np.stack([us, vs], axis=-1)
