"""
Типы боксов: 2D-детекция в изображении и 3D-бокс на плоскости платформы.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class ClassLabel(Enum):
    """
    Класс объекта в разметке.

    Values:
        PERSON: Взрослый
        CHILD: Ребёнок
        WHEELCHAIR: Инвалидная коляска
        BUGGY: Детская коляска
        LUGGAGE: Багаж, рюкзаки
        OBJECT: Прочие объекты на платформе
    """
    PERSON = "person"
    CHILD = "child"
    WHEELCHAIR = "wheelchair"
    BUGGY = "buggy"
    LUGGAGE = "luggage"
    OBJECT = "object"

    @property
    def is_human(self) -> bool:
        """Люди (для настройки PEDS)."""
        return self in (ClassLabel.PERSON, ClassLabel.CHILD)


@dataclass(frozen=True)
class BBox2D:
    """
    2D-бокс детекции или трека.

    Attributes:
        left, top: Левый верхний угол (пиксели)
        w_bb, h_bb: Ширина и высота (пиксели)
        confidence: Уверенность в [0, 1]
        class_label: Класс объекта
        source_id: Идентификатор источника (трекера)
        track_id: Идентификатор трека внутри источника
        frame_index: Номер кадра
    """
    left: float
    top: float
    w_bb: float
    h_bb: float
    confidence: float = 1.0
    class_label: ClassLabel = ClassLabel.PERSON
    source_id: str = ""
    track_id: Optional[int] = None
    frame_index: int = 0

    def __post_init__(self) -> None:
        if self.w_bb < 1 or self.h_bb < 1:
            raise ValueError(f"Размер бокса должен быть >= 1: {self.w_bb}x{self.h_bb}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence вне [0, 1]: {self.confidence}")

    @classmethod
    def within_image(cls, left: float, top: float, w_bb: float, h_bb: float,
                     width: int, height: int, **kwargs) -> "BBox2D":
        """Создаёт бокс, обрезанный границами изображения width x height."""
        x0 = min(max(left, 0.0), width - 1.0)
        y0 = min(max(top, 0.0), height - 1.0)
        x1 = min(max(left + w_bb, x0 + 1.0), float(width))
        y1 = min(max(top + h_bb, y0 + 1.0), float(height))
        return cls(left=x0, top=y0, w_bb=max(1.0, x1 - x0), h_bb=max(1.0, y1 - y0), **kwargs)

    def clamp(self, width: int, height: int) -> "BBox2D":
        """Возвращает копию, обрезанную границами изображения."""
        clamped = BBox2D.within_image(self.left, self.top, self.w_bb, self.h_bb, width, height)
        return replace(self, left=clamped.left, top=clamped.top, w_bb=clamped.w_bb, h_bb=clamped.h_bb)

    def pixel_region(self, width: int, height: int) -> Tuple[int, int, int, int]:
        """
        Целочисленная область пикселей (u0, v0, w, h) внутри изображения.

        Суммирование ведётся по u в [u0, u0 + w), v в [v0, v0 + h).
        """
        u0 = int(np.clip(np.floor(self.left), 0, width - 1))
        v0 = int(np.clip(np.floor(self.top), 0, height - 1))
        w = max(1, min(int(round(self.w_bb)), width - u0))
        h = max(1, min(int(round(self.h_bb)), height - v0))
        return u0, v0, w, h

    @property
    def center(self) -> Tuple[float, float]:
        """Центр бокса в пикселях."""
        return (self.left + self.w_bb / 2.0, self.top + self.h_bb / 2.0)

    @property
    def tlwh(self) -> np.ndarray:
        return np.array([self.left, self.top, self.w_bb, self.h_bb], dtype=np.float64)


@dataclass(frozen=True)
class BBox3D:
    """
    3D-бокс, выровненный по системе плоскости платформы.

    Attributes:
        center: Центр (x, y, z) в системе плоскости, м
        extent: (ширина по x, высота по z, глубина по y), м
        yaw: Поворот вокруг нормали (рад), 0 для поднятых 2D-боксов
        confidence: Уверенность
        source_id: Идентификатор источника
        track_id: Идентификатор трека внутри источника
        frame_index: Номер кадра
        class_label: Класс объекта
    """
    center: Tuple[float, float, float]
    extent: Tuple[float, float, float]
    yaw: float = 0.0
    confidence: float = 1.0
    source_id: str = ""
    track_id: Optional[int] = None
    frame_index: int = 0
    class_label: ClassLabel = ClassLabel.PERSON

    def __post_init__(self) -> None:
        if len(self.center) != 3 or len(self.extent) != 3:
            raise ValueError("center и extent должны иметь по 3 компоненты")
        if any(not e > 0 for e in self.extent):
            raise ValueError(f"Размеры бокса должны быть > 0: {self.extent}")

    @property
    def width(self) -> float:
        return self.extent[0]

    @property
    def height(self) -> float:
        return self.extent[1]

    @property
    def depth(self) -> float:
        return self.extent[2]

    @property
    def half_sizes(self) -> np.ndarray:
        """Полуразмеры по осям плоскости (x, y, z)."""
        return np.array([self.width, self.depth, self.height], dtype=np.float64) / 2.0

    @property
    def min_corner(self) -> np.ndarray:
        return np.asarray(self.center, dtype=np.float64) - self.half_sizes

    @property
    def max_corner(self) -> np.ndarray:
        return np.asarray(self.center, dtype=np.float64) + self.half_sizes

    @property
    def volume(self) -> float:
        return float(self.width * self.height * self.depth)

    @property
    def footprint(self) -> Tuple[float, float, float, float]:
        """Проекция на плоскость: (min_x, min_y, max_x, max_y)."""
        lo, hi = self.min_corner, self.max_corner
        return (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    def corners(self) -> np.ndarray:
        """Восемь вершин бокса (8, 3) в системе плоскости."""
        lo, hi = self.min_corner, self.max_corner
        return np.array([
            [x, y, z]
            for x in (lo[0], hi[0])
            for y in (lo[1], hi[1])
            for z in (lo[2], hi[2])
        ])
