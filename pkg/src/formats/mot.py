"""
Текстовый формат MOTChallenge для детекций и 2D-треков.

frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Union

from ..lifting import BBox2D, ClassLabel
from .errors import ParseError, format_float


logger = logging.getLogger(__name__)

_FIELDS = ("frame", "id", "bb_left", "bb_top", "bb_width", "bb_height", "conf", "x", "y", "z")
_MIN_FIELDS = 7


@dataclass(frozen=True)
class MotRecord:
    """
    Строка файла MOT.

    Attributes:
        frame: Номер кадра (с 1)
        id: Идентификатор трека (-1 для детекций без трека)
        bb_left, bb_top, bb_width, bb_height: Бокс в пикселях
        conf: Уверенность
        x, y, z: Мировые координаты, -1 если отсутствуют
    """
    frame: int
    id: int
    bb_left: float
    bb_top: float
    bb_width: float
    bb_height: float
    conf: float = 1.0
    x: float = -1.0
    y: float = -1.0
    z: float = -1.0

    def __post_init__(self) -> None:
        if self.frame < 1:
            raise ValueError(f"frame должен быть >= 1, получено {self.frame}")
        if not (self.bb_width > 0 and self.bb_height > 0):
            raise ValueError(f"Размер бокса должен быть > 0: {self.bb_width}x{self.bb_height}")

    def to_line(self) -> str:
        values = [str(self.frame), str(self.id)] + [
            format_float(getattr(self, name)) for name in _FIELDS[2:]
        ]
        return ",".join(values)

    def to_bbox(self, source_id: str = "", class_label: ClassLabel = ClassLabel.PERSON) -> BBox2D:
        return BBox2D(
            left=self.bb_left,
            top=self.bb_top,
            w_bb=max(1.0, self.bb_width),
            h_bb=max(1.0, self.bb_height),
            confidence=min(1.0, max(0.0, self.conf)),
            class_label=class_label,
            source_id=source_id,
            track_id=self.id if self.id >= 0 else None,
            frame_index=self.frame,
        )

    @classmethod
    def from_bbox(cls, box: BBox2D) -> "MotRecord":
        return cls(
            frame=box.frame_index,
            id=box.track_id if box.track_id is not None else -1,
            bb_left=box.left,
            bb_top=box.top,
            bb_width=box.w_bb,
            bb_height=box.h_bb,
            conf=box.confidence,
        )


def _parse_int(text: str, line: int, column: int) -> int:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"ожидалось целое, получено {text!r}", line, column) from None
    if not value.is_integer():
        raise ParseError(f"ожидалось целое, получено {text!r}", line, column)
    return int(value)


def _parse_float(text: str, line: int, column: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"ожидалось число, получено {text!r}", line, column) from None


def parse_mot_line(text: str, line: int = 1) -> MotRecord:
    """Разбирает одну строку; номер строки и колонки (с 1) в ошибке."""
    fields = [field.strip() for field in text.split(",")]
    if not _MIN_FIELDS <= len(fields) <= len(_FIELDS):
        raise ParseError(
            f"ожидалось от {_MIN_FIELDS} до {len(_FIELDS)} полей, получено {len(fields)}",
            line,
            min(len(fields), len(_FIELDS)) + 1,
        )

    frame = _parse_int(fields[0], line, 1)
    track_id = _parse_int(fields[1], line, 2)
    numbers = [_parse_float(field, line, index + 1) for index, field in enumerate(fields) if index >= 2]

    if frame < 1:
        raise ParseError(f"frame должен быть >= 1, получено {frame}", line, 1)
    if not numbers[2] > 0:
        raise ParseError(f"ширина бокса должна быть > 0, получено {fields[4]}", line, 5)
    if not numbers[3] > 0:
        raise ParseError(f"высота бокса должна быть > 0, получено {fields[5]}", line, 6)

    numbers += [-1.0] * (len(_FIELDS) - 2 - len(numbers))
    return MotRecord(frame, track_id, *numbers)


def read_mot(path: Union[str, Path]) -> List[MotRecord]:
    """
    Читает файл MOT. Пустые строки пропускаются.

    Raises:
        ParseError: Строка не разбирается (с номером строки и колонки)
    """
    records: List[MotRecord] = []
    with open(path, "r", encoding="utf-8") as f:
        for number, text in enumerate(f, start=1):
            if not text.strip():
                continue
            records.append(parse_mot_line(text.strip(), number))
    logger.debug(f"{path}: прочитано записей {len(records)}")
    return records


def write_mot(records: Iterable[MotRecord], path: Union[str, Path]) -> int:
    """Записывает записи по одной на строку. Возвращает число записей."""
    lines = [record.to_line() for record in records]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("".join(line + "\n" for line in lines))
    return len(lines)


def group_by_frame(records: Iterable[MotRecord]) -> Dict[int, List[MotRecord]]:
    """Записи по номеру кадра в порядке файла."""
    frames: Dict[int, List[MotRecord]] = defaultdict(list)
    for record in records:
        frames[record.frame].append(record)
    return dict(sorted(frames.items()))


def read_detections(
    path: Union[str, Path],
    source_id: str = "",
    class_label: ClassLabel = ClassLabel.PERSON,
) -> Dict[int, List[BBox2D]]:
    """2D-боксы файла MOT по кадрам."""
    return {
        frame: [record.to_bbox(source_id, class_label) for record in frame_records]
        for frame, frame_records in group_by_frame(read_mot(path)).items()
    }
