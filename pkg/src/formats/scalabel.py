"""
Конвертер экспорта инструмента разметки (список кадров Scalabel)
в записи AnnotationRecord.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

from ..constants import CameraViews, Occlusion
from ..lifting import ClassLabel
from .annotations import AnnotationRecord
from .errors import SchemaError


logger = logging.getLogger(__name__)

_CATEGORIES: Dict[str, ClassLabel] = {
    "person": ClassLabel.PERSON,
    "pedestrian": ClassLabel.PERSON,
    "adult": ClassLabel.PERSON,
    "child": ClassLabel.CHILD,
    "wheelchair": ClassLabel.WHEELCHAIR,
    "buggy": ClassLabel.BUGGY,
    "stroller": ClassLabel.BUGGY,
    "luggage": ClassLabel.LUGGAGE,
    "bag": ClassLabel.LUGGAGE,
    "backpack": ClassLabel.LUGGAGE,
}


def _occlusion(value: Any, pointer: str) -> int:
    if value is None:
        return 0
    text = str(value).strip().rstrip("%")
    try:
        level = int(text)
    except ValueError:
        raise SchemaError(f"некорректное перекрытие {value!r}", pointer) from None
    if level not in Occlusion.LEVELS:
        raise SchemaError(f"уровень перекрытия {level} не из {Occlusion.LEVELS}", pointer)
    return level


def convert_scalabel(
    export: Union[List[Dict[str, Any]], str, Path],
    camera_view: str = CameraViews.LEFT_RIG,
) -> List[AnnotationRecord]:
    """
    Преобразует экспорт в записи разметки.

    Номер кадра - frameIndex + 1 (или позиция кадра в списке + 1).
    Строковые id, не являющиеся числами, получают последовательные номера
    в порядке первого появления. Неизвестные категории - OBJECT.

    Raises:
        SchemaError: Некорректная структура или значения
    """
    if not isinstance(export, list):
        with open(export, "r", encoding="utf-8") as f:
            export = json.load(f)
        if not isinstance(export, list):
            raise SchemaError("ожидался список кадров")

    ids: Dict[str, int] = {}
    records: List[AnnotationRecord] = []
    unknown = 0
    for position, frame in enumerate(export):
        pointer = f"/{position}"
        if not isinstance(frame, dict):
            raise SchemaError("ожидался объект кадра", pointer)
        frame_number = int(frame.get("frameIndex", frame.get("index", position))) + 1

        for i, label in enumerate(frame.get("labels") or []):
            label_pointer = f"{pointer}/labels/{i}"
            box = label.get("box2d")
            if box is None:
                continue
            try:
                x1, y1, x2, y2 = (float(box[k]) for k in ("x1", "y1", "x2", "y2"))
            except (KeyError, TypeError, ValueError):
                raise SchemaError("ожидался box2d с x1, y1, x2, y2", f"{label_pointer}/box2d") from None
            if x2 <= x1 or y2 <= y1:
                raise SchemaError("пустой box2d", f"{label_pointer}/box2d")

            raw_id = str(label.get("id", ""))
            if raw_id.isdigit():
                object_id = int(raw_id)
            else:
                object_id = ids.setdefault(raw_id, len(ids) + 1)

            category = str(label.get("category", "")).lower()
            class_label = _CATEGORIES.get(category, ClassLabel.OBJECT)
            if category not in _CATEGORIES:
                unknown += 1

            attributes = label.get("attributes") or {}
            records.append(AnnotationRecord(
                frame=frame_number,
                object_id=object_id,
                class_label=class_label,
                box=(x1, y1, x2 - x1, y2 - y1),
                occlusion=_occlusion(attributes.get("occlusion"), f"{label_pointer}/attributes/occlusion"),
                camera_view=camera_view,
            ))

    if unknown:
        logger.info(f"Категории вне словаря отнесены к object: {unknown}")
    logger.info(f"Сконвертировано объектов: {len(records)} из кадров: {len(export)}")
    return records
