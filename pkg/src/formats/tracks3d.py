"""
CSV 3D-треков в системе плоскости платформы.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Union

from ..lifting import BBox3D
from .errors import ParseError, format_float


logger = logging.getLogger(__name__)

HEADER = "frame,id,x,y,z,w,h,d,yaw,conf,tracker_id"
_COLUMNS = HEADER.split(",")


@dataclass(frozen=True)
class Track3DRecord:
    """Строка файла 3D-треков: центр и размеры в метрах."""
    frame: int
    id: int
    x: float
    y: float
    z: float
    w: float
    h: float
    d: float
    yaw: float = 0.0
    conf: float = 1.0
    tracker_id: str = ""

    def __post_init__(self) -> None:
        if not (self.w > 0 and self.h > 0 and self.d > 0):
            raise ValueError(f"Размеры должны быть > 0: {self.w}, {self.h}, {self.d}")
        if "," in self.tracker_id or "\n" in self.tracker_id:
            raise ValueError(f"tracker_id не может содержать ',' или перевод строки: {self.tracker_id!r}")

    def to_line(self) -> str:
        numbers = (self.x, self.y, self.z, self.w, self.h, self.d, self.yaw, self.conf)
        return ",".join([str(self.frame), str(self.id), *map(format_float, numbers), self.tracker_id])

    def to_box(self) -> BBox3D:
        return BBox3D(
            center=(self.x, self.y, self.z),
            extent=(self.w, self.h, self.d),
            yaw=self.yaw,
            confidence=self.conf,
            source_id=self.tracker_id,
            track_id=self.id,
            frame_index=self.frame,
        )

    @classmethod
    def from_box(cls, box: BBox3D) -> "Track3DRecord":
        return cls(
            frame=box.frame_index,
            id=box.track_id if box.track_id is not None else -1,
            x=float(box.center[0]),
            y=float(box.center[1]),
            z=float(box.center[2]),
            w=float(box.width),
            h=float(box.height),
            d=float(box.depth),
            yaw=float(box.yaw),
            conf=float(box.confidence),
            tracker_id=box.source_id,
        )


def _parse_line(text: str, line: int) -> Track3DRecord:
    fields = text.split(",")
    if len(fields) != len(_COLUMNS):
        raise ParseError(f"ожидалось {len(_COLUMNS)} полей, получено {len(fields)}", line,
                         min(len(fields), len(_COLUMNS)) + 1)

    values = []
    for column, field in enumerate(fields[:-1], start=1):
        try:
            values.append(int(field) if column <= 2 else float(field))
        except ValueError:
            raise ParseError(f"{_COLUMNS[column - 1]}: некорректное значение {field!r}", line, column) from None

    try:
        return Track3DRecord(*values, tracker_id=fields[-1])
    except ValueError as e:
        raise ParseError(str(e), line) from e


def read_tracks3d(path: Union[str, Path]) -> List[Track3DRecord]:
    """
    Читает файл 3D-треков. Первая строка - заголовок.

    Raises:
        ParseError: Неверный заголовок или строка
    """
    records: List[Track3DRecord] = []
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
        if header != HEADER:
            raise ParseError(f"ожидался заголовок {HEADER!r}, получено {header!r}", 1)
        for number, text in enumerate(f, start=2):
            text = text.rstrip("\n")
            if not text.strip():
                continue
            records.append(_parse_line(text, number))
    logger.debug(f"{path}: прочитано 3D-записей {len(records)}")
    return records


def write_tracks3d(records: Iterable[Track3DRecord], path: Union[str, Path]) -> int:
    """Записывает заголовок и записи. Возвращает число записей."""
    lines = [HEADER] + [record.to_line() for record in records]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return len(lines) - 1


def read_boxes3d(path: Union[str, Path]) -> List[BBox3D]:
    return [record.to_box() for record in read_tracks3d(path)]


def write_boxes3d(boxes: Iterable[BBox3D], path: Union[str, Path]) -> int:
    return write_tracks3d((Track3DRecord.from_box(box) for box in boxes), path)
