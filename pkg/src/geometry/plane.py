"""
Плоскость платформы и жёсткое преобразование камера -> плоскость.

Система плоскости: x - ось x камеры, спроецированная на плоскость;
y = z x x - направление взгляда поперёк платформы (перпендикулярно поезду);
z - нормаль, высота над плоскостью со знаком.
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..constants import Tolerances
from .camera import GeometryError


logger = logging.getLogger(__name__)


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GroundPlane:
    """
    Плоскость n·X = offset в системе камеры и её система координат.

    Создавайте через GroundPlane.from_normal_offset - он ориентирует нормаль
    так, что камера находится над плоскостью, и строит to_plane.

    Attributes:
        normal: Единичная нормаль (система камеры)
        offset: Смещение плоскости (м)
        rotation: Строки - оси x, y, z плоскости в системе камеры
        origin: Начало системы плоскости (основание перпендикуляра из камеры)
    """
    normal: np.ndarray
    offset: float
    rotation: np.ndarray = field(repr=False)
    origin: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if abs(np.linalg.norm(self.normal) - 1.0) > Tolerances.UNIT_NORMAL:
            raise GeometryError(f"Нормаль не единичная: |n|={np.linalg.norm(self.normal)}")

    @classmethod
    def from_normal_offset(cls, normal: Sequence[float], offset: float) -> "GroundPlane":
        """
        Строит плоскость по нормали и смещению.

        Args:
            normal: Нормаль (не обязательно единичная)
            offset: Смещение для исходной нормали

        Returns:
            GroundPlane: Плоскость с камерой на положительной стороне
        """
        n = np.asarray(normal, dtype=np.float64)
        norm = np.linalg.norm(n)
        if norm == 0 or not np.isfinite(norm):
            raise GeometryError("Нулевая нормаль плоскости")
        n = n / norm
        offset = float(offset) / norm

        # Камера (начало координат) должна быть над плоскостью: 0 - offset > 0
        if offset > 0:
            n, offset = -n, -offset

        x_axis = np.array([1.0, 0.0, 0.0]) - n[0] * n
        if np.linalg.norm(x_axis) < 1e-6:
            x_axis = np.array([0.0, 0.0, 1.0]) - n[2] * n
        x_axis /= np.linalg.norm(x_axis)
        y_axis = np.cross(n, x_axis)

        rotation = np.stack([x_axis, y_axis, n])
        return cls(
            normal=_readonly(n),
            offset=offset,
            rotation=_readonly(rotation),
            origin=_readonly(n * offset),
        )

    @property
    def camera_height(self) -> float:
        """Высота центра камеры над плоскостью (м)."""
        return -self.offset

    @property
    def to_plane(self) -> np.ndarray:
        """Жёсткое преобразование камера -> плоскость, матрица 3x4 (построчно)."""
        translation = -self.rotation @ self.origin
        return np.hstack([self.rotation, translation[:, None]])

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Высота точек камеры над плоскостью: n·X - offset."""
        return np.asarray(points, dtype=np.float64) @ self.normal - self.offset


def to_ground_frame(plane: GroundPlane, point: np.ndarray) -> np.ndarray:
    """
    Переводит точку (3,) или массив (N, 3) из системы камеры в систему плоскости.

    z результата - высота над плоскостью со знаком.
    """
    points = np.asarray(point, dtype=np.float64)
    return (points - plane.origin) @ plane.rotation.T


def from_ground_frame(plane: GroundPlane, point: np.ndarray) -> np.ndarray:
    """Обратное преобразование: система плоскости -> система камеры."""
    points = np.asarray(point, dtype=np.float64)
    return points @ plane.rotation + plane.origin


def plane_from_pose(camera_height: float, pitch: float) -> GroundPlane:
    """
    Плоскость для камеры без крена на высоте camera_height,
    наклонённой вниз на угол pitch (рад).
    """
    if camera_height <= 0:
        raise GeometryError(f"Высота камеры должна быть > 0, получено {camera_height}")
    up = np.array([0.0, -np.cos(pitch), -np.sin(pitch)])
    return GroundPlane.from_normal_offset(up, -camera_height)
