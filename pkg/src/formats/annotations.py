"""
JSON-разметка: объекты по кадрам, линия безопасности и отчёт о нарушениях.

Схема документа разметки (version 1):

    {
      "version": 1,
      "annotations": [
        {"frame": 1, "id": 3, "class": "person", "box": [left, top, width, height],
         "occlusion": 0, "camera_view": "left_rig", "ground_position": [x, y]}
      ],
      "safety_line": {"points": [[x, y], ...], "danger_side": "left"}
    }

ground_position необязателен (координаты следа на плоскости, метры).
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..constants import CameraViews, Formats, Occlusion
from ..fusion import DangerSide, SafetyLine, SafetyViolation
from ..lifting import BBox2D, ClassLabel
from .errors import SchemaError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnnotationRecord:
    """
    Размеченный объект в кадре.

    Attributes:
        frame: Номер кадра
        object_id: Идентификатор, единый для всех сцен и камер
        class_label: Класс объекта
        box: (left, top, width, height) в пикселях
        occlusion: Уровень перекрытия (%)
        camera_view: Камера стереоустановки
        ground_position: (x, y) на плоскости, если известно
    """
    frame: int
    object_id: int
    class_label: ClassLabel
    box: Tuple[float, float, float, float]
    occlusion: int = 0
    camera_view: str = CameraViews.LEFT_RIG
    ground_position: Optional[Tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.occlusion not in Occlusion.LEVELS:
            raise ValueError(f"Уровень перекрытия {self.occlusion} не из {Occlusion.LEVELS}")
        if self.camera_view not in CameraViews.ALL:
            raise ValueError(f"Неизвестная камера: {self.camera_view}")

    def to_bbox(self, source_id: str = "") -> BBox2D:
        left, top, width, height = self.box
        return BBox2D(
            left=left, top=top, w_bb=max(1.0, width), h_bb=max(1.0, height),
            class_label=self.class_label, source_id=source_id,
            track_id=self.object_id, frame_index=self.frame,
        )


def _require(obj: Dict[str, Any], key: str, pointer: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError("ожидался объект", pointer)
    if key not in obj:
        raise SchemaError(f"отсутствует ключ '{key}'", f"{pointer}/{key}")
    return obj[key]


def _number(value: Any, pointer: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"ожидалось число, получено {value!r}", pointer)
    return float(value) if isinstance(value, float) else value


def _integer(value: Any, pointer: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"ожидалось целое, получено {value!r}", pointer)
    return value


def _point(value: Any, pointer: str) -> Tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise SchemaError("ожидалась пара [x, y]", pointer)
    return (_number(value[0], f"{pointer}/0"), _number(value[1], f"{pointer}/1"))


def _parse_record(item: Any, pointer: str) -> AnnotationRecord:
    frame = _integer(_require(item, "frame", pointer), f"{pointer}/frame")
    object_id = _integer(_require(item, "id", pointer), f"{pointer}/id")

    label = _require(item, "class", pointer)
    try:
        class_label = ClassLabel(label)
    except ValueError:
        raise SchemaError(f"неизвестный класс {label!r}", f"{pointer}/class") from None

    box = _require(item, "box", pointer)
    if not isinstance(box, list) or len(box) != 4:
        raise SchemaError("ожидался [left, top, width, height]", f"{pointer}/box")
    box = tuple(_number(v, f"{pointer}/box/{i}") for i, v in enumerate(box))
    if not (box[2] > 0 and box[3] > 0):
        raise SchemaError("размер бокса должен быть > 0", f"{pointer}/box")

    occlusion = _integer(_require(item, "occlusion", pointer), f"{pointer}/occlusion")
    if occlusion not in Occlusion.LEVELS:
        raise SchemaError(f"уровень перекрытия {occlusion} не из {Occlusion.LEVELS}", f"{pointer}/occlusion")

    view = _require(item, "camera_view", pointer)
    if view not in CameraViews.ALL:
        raise SchemaError(f"неизвестная камера {view!r}", f"{pointer}/camera_view")

    ground = item.get("ground_position")
    ground_position = _point(ground, f"{pointer}/ground_position") if ground is not None else None

    return AnnotationRecord(
        frame=frame,
        object_id=object_id,
        class_label=class_label,
        box=box,
        occlusion=occlusion,
        camera_view=view,
        ground_position=ground_position,
    )


def _load(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"некорректный JSON: {e}") from e

    version = _require(document, "version", "")
    if version != Formats.ANNOTATION_SCHEMA_VERSION:
        raise SchemaError(f"неподдерживаемая версия {version!r}", "/version")
    return document


def read_annotations(path: Union[str, Path]) -> List[AnnotationRecord]:
    """
    Читает объекты разметки.

    Raises:
        SchemaError: С JSON-указателем на ошибочное поле
    """
    document = _load(path)
    items = _require(document, "annotations", "")
    if not isinstance(items, list):
        raise SchemaError("ожидался массив", "/annotations")
    records = [_parse_record(item, f"/annotations/{i}") for i, item in enumerate(items)]
    logger.debug(f"{path}: размеченных объектов {len(records)}")
    return records


def read_safety_line(path: Union[str, Path]) -> SafetyLine:
    """
    Читает линию безопасности.

    Raises:
        SchemaError: Нет ключа safety_line или ошибка в нём
    """
    document = _load(path)
    line = _require(document, "safety_line", "")
    points = _require(line, "points", "/safety_line")
    if not isinstance(points, list) or len(points) < 2:
        raise SchemaError("ожидалось минимум 2 точки", "/safety_line/points")
    parsed = [_point(p, f"/safety_line/points/{i}") for i, p in enumerate(points)]

    side = line.get("danger_side", DangerSide.LEFT.value)
    try:
        danger_side = DangerSide(side)
    except ValueError:
        raise SchemaError(f"danger_side должен быть left или right, получено {side!r}",
                          "/safety_line/danger_side") from None
    return SafetyLine(points=tuple(parsed), danger_side=danger_side)


def _record_to_json(record: AnnotationRecord) -> Dict[str, Any]:
    item: Dict[str, Any] = {
        "frame": record.frame,
        "id": record.object_id,
        "class": record.class_label.value,
        "box": list(record.box),
        "occlusion": record.occlusion,
        "camera_view": record.camera_view,
    }
    if record.ground_position is not None:
        item["ground_position"] = list(record.ground_position)
    return item


def write_annotations(
    records: Iterable[AnnotationRecord],
    path: Union[str, Path],
    safety_line: Optional[SafetyLine] = None,
) -> None:
    """Записывает документ разметки (и линию безопасности, если задана)."""
    document: Dict[str, Any] = {
        "version": Formats.ANNOTATION_SCHEMA_VERSION,
        "annotations": [_record_to_json(r) for r in records],
    }
    if safety_line is not None:
        document["safety_line"] = {
            "points": [list(p) for p in safety_line.points],
            "danger_side": safety_line.danger_side.value,
        }

    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, ensure_ascii=False)
        f.write("\n")


def write_safety_report(violations: Sequence[SafetyViolation], path: Union[str, Path]) -> None:
    """Отчёт о нарушениях: список {fused_id, start_frame, end_frame, min_distance_m}."""
    report = [
        {
            "fused_id": v.fused_id,
            "start_frame": v.start_frame,
            "end_frame": v.end_frame,
            "min_distance_m": v.min_distance_m,
        }
        for v in violations
    ]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, ensure_ascii=False)
        f.write("\n")
