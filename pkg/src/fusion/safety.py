"""
Отчёт о нарушении линии безопасности.

Линия безопасности - ломаная в системе плоскости; область, которую нужно
освободить перед отправлением поезда, лежит по одну сторону от неё.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import groupby
from typing import Dict, List, Optional, Sequence, Tuple

from shapely.geometry import LineString, Polygon, box as shapely_box

from ..lifting import BBox3D


logger = logging.getLogger(__name__)

# Ширина полосы опасной области от линии (м)
_REGION_REACH = 100.0


class DangerSide(Enum):
    """Сторона от направления ломаной, где лежит опасная область."""
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class SafetyLine:
    """
    Линия безопасности.

    Attributes:
        points: Вершины ломаной (x, y) в системе плоскости
        danger_side: Сторона опасной области относительно направления ломаной
    """
    points: Tuple[Tuple[float, float], ...]
    danger_side: DangerSide = DangerSide.LEFT

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("Линия безопасности должна иметь минимум 2 точки")
        object.__setattr__(self, "points", tuple((float(x), float(y)) for x, y in self.points))
        object.__setattr__(self, "danger_side", DangerSide(self.danger_side))

    @property
    def line(self) -> LineString:
        return LineString(self.points)

    def danger_region(self) -> Polygon:
        """Односторонний буфер ломаной: слева при distance > 0, справа при < 0."""
        distance = _REGION_REACH if self.danger_side == DangerSide.LEFT else -_REGION_REACH
        return self.line.buffer(distance, single_sided=True, cap_style="flat")


@dataclass(frozen=True)
class SafetyViolation:
    """Интервал кадров, когда след трека заходит в опасную область."""
    fused_id: int
    start_frame: int
    end_frame: int
    min_distance_m: float


def _footprint(track: BBox3D) -> Polygon:
    return shapely_box(*track.footprint)


def safety_report(
    tracks: Sequence[BBox3D],
    safety_line: SafetyLine,
    frame_range: Optional[Tuple[int, int]] = None,
) -> List[SafetyViolation]:
    """
    Нарушения линии безопасности.

    Интервал - непрерывная серия кадров трека, в которых след пересекает
    опасную область. min_distance_m - наименьшее расстояние следа до
    линии за интервал (0, если след пересекает линию).

    Args:
        tracks: Фьюжн-треки (track_id = fused_id)
        safety_line: Линия безопасности
        frame_range: Включительный диапазон кадров (None - все кадры)

    Returns:
        List[SafetyViolation]: По fused_id, затем по start_frame
    """
    region = safety_line.danger_region()
    line = safety_line.line

    per_track: Dict[int, Dict[int, float]] = {}
    for track in tracks:
        if track.track_id is None:
            continue
        if frame_range is not None and not frame_range[0] <= track.frame_index <= frame_range[1]:
            continue
        footprint = _footprint(track)
        if footprint.intersects(region):
            distances = per_track.setdefault(int(track.track_id), {})
            distance = float(footprint.distance(line))
            distances[track.frame_index] = min(distance, distances.get(track.frame_index, distance))

    violations: List[SafetyViolation] = []
    for fused_id in sorted(per_track):
        frames = sorted(per_track[fused_id].items())
        # Серии подряд идущих кадров: frame - порядковый номер постоянен
        for _, run in groupby(enumerate(frames), key=lambda item: item[1][0] - item[0]):
            span = [entry for _, entry in run]
            violations.append(SafetyViolation(
                fused_id=fused_id,
                start_frame=span[0][0],
                end_frame=span[-1][0],
                min_distance_m=min(distance for _, distance in span),
            ))

    if violations:
        logger.warning(f"Нарушений линии безопасности: {len(violations)}")
    return violations
