"""
Перебор комбинаций источников: фьюжн каждой непустой комбинации и оценка
в настройках ALL и PEDS.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from ..config import FusionConfig, MetricsConfig
from ..constants import Limits
from ..formats import AnnotationRecord
from ..fusion import fuse_sequence
from ..geometry import CameraIntrinsics, GeometryError, GroundPlane
from ..lifting import BBox3D, project_bbox3d
from ..metrics import GtObject, Hypothesis, MatchMode, TaskSetting, evaluate_sequence, write_reports
from .graph import MissingSource, TooManySources


logger = logging.getLogger(__name__)


def enumerate_combinations(n: int) -> List[Tuple[int, ...]]:
    """
    Все непустые подмножества {0..n-1}: по размеру, затем лексикографически.

    Raises:
        TooManySources: n > 16
    """
    if n < 1:
        raise ValueError(f"Число источников должно быть >= 1, получено {n}")
    if n > Limits.MAX_SOURCES:
        raise TooManySources(f"Источников {n}, максимум {Limits.MAX_SOURCES}")
    return [subset for size in range(1, n + 1) for subset in combinations(range(n), size)]


@dataclass
class CombinationSweep:
    """
    Перебор комбинаций результатов трекинга.

    Число результатов n = n_s * (n_2d + n_gp * n_3d): для каждого стерео-метода
    по одному результату на 2D-трекер и на пару (оценка плоскости, 3D-трекер).

    Attributes:
        sources: Имена результатов (длина n)
        rows: Строки результатов после evaluate
    """
    sources: Tuple[str, ...]
    n_s: int = 1
    n_gp: int = 0
    n_2d: int = 0
    n_3d: int = 0
    rows: List[Dict[str, object]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.sources = tuple(self.sources)
        if len(set(self.sources)) != len(self.sources):
            raise ValueError("Имена источников должны быть уникальны")
        if self.n_2d or self.n_3d:
            expected = self.n_s * (self.n_2d + self.n_gp * self.n_3d)
            if expected != len(self.sources):
                raise ValueError(f"Ожидалось {expected} источников, передано {len(self.sources)}")

    @classmethod
    def from_counts(cls, n_s: int, n_gp: int, n_2d: int, n_3d: int) -> "CombinationSweep":
        """Имена вида s1/2d1 и s1/gp1/3d1."""
        names: List[str] = []
        for s in range(1, n_s + 1):
            names.extend(f"s{s}/2d{t}" for t in range(1, n_2d + 1))
            names.extend(
                f"s{s}/gp{g}/3d{t}" for g in range(1, n_gp + 1) for t in range(1, n_3d + 1)
            )
        return cls(sources=tuple(names), n_s=n_s, n_gp=n_gp, n_2d=n_2d, n_3d=n_3d)

    @property
    def n(self) -> int:
        return len(self.sources)

    @property
    def subsets(self) -> List[Tuple[str, ...]]:
        return [tuple(self.sources[i] for i in subset) for subset in enumerate_combinations(self.n)]

    @property
    def count(self) -> int:
        return 2 ** self.n - 1


def gt_objects_from_annotations(records: Sequence[AnnotationRecord], mode: MatchMode) -> List[GtObject]:
    """
    Эталон для оценки: бокс в пикселях или позиция на плоскости.

    Raises:
        ValueError: Для оценки на плоскости у записи нет ground_position
    """
    objects = []
    for record in records:
        if mode == MatchMode.PLANE_DISTANCE:
            if record.ground_position is None:
                raise ValueError(f"Кадр {record.frame}, объект {record.object_id}: нет позиции на плоскости")
            box = tuple(record.ground_position)
        else:
            box = tuple(record.box)
        objects.append(GtObject(
            frame=record.frame,
            gt_id=record.object_id,
            box=box,
            occlusion=record.occlusion,
            class_label=record.class_label,
        ))
    return objects


def hypotheses_from_boxes(
    boxes: Sequence[BBox3D],
    mode: MatchMode,
    intrinsics: Optional[CameraIntrinsics] = None,
    plane: Optional[GroundPlane] = None,
) -> List[Hypothesis]:
    """
    Гипотезы из 3D-боксов: центр следа на плоскости или проекция в изображение.

    Для IMAGE_IOU нужны intrinsics и plane.
    """
    if mode == MatchMode.IMAGE_IOU and (intrinsics is None or plane is None):
        raise ValueError("Для оценки в изображении нужны параметры камеры и плоскость")
    hypotheses = []
    behind = 0
    for box in boxes:
        if mode == MatchMode.PLANE_DISTANCE:
            position: Tuple[float, ...] = (float(box.center[0]), float(box.center[1]))
        else:
            try:
                position = tuple(project_bbox3d(box, intrinsics, plane))
            except GeometryError:
                behind += 1
                continue
        hypotheses.append(Hypothesis(frame=box.frame_index, hyp_id=box.track_id, box=position))
    if behind:
        logger.warning(f"Пропущено гипотез за камерой: {behind}")
    return hypotheses


def sweep_eval(
    sources: Mapping[str, Sequence[BBox3D]],
    ground_truth: Sequence[AnnotationRecord],
    names: Optional[Sequence[str]] = None,
    settings: Sequence[TaskSetting] = (TaskSetting.ALL, TaskSetting.PEDS),
    mode: MatchMode = MatchMode.PLANE_DISTANCE,
    fusion_cfg: Optional[FusionConfig] = None,
    metrics_cfg: Optional[MetricsConfig] = None,
    intrinsics: Optional[CameraIntrinsics] = None,
    plane: Optional[GroundPlane] = None,
    frames: Optional[Sequence[int]] = None,
    progress: Optional[Callable[[Tuple[str, ...]], None]] = None,
) -> pd.DataFrame:
    """
    Оценка всех непустых комбинаций источников.

    Комбинации из одного источника оцениваются без фьюжна.

    Args:
        sources: Имя источника -> боксы всех кадров
        ground_truth: Эталонная разметка
        names: Порядок источников (по умолчанию - порядок sources)
        settings: Настройки задачи
        progress: Вызывается после каждой комбинации

    Returns:
        pd.DataFrame: Строка на (комбинация, настройка): combination, size,
            setting и колонки метрик

    Raises:
        MissingSource: Источник из names отсутствует в sources
    """
    names = list(names) if names is not None else list(sources)
    if not names:
        raise MissingSource("Не задано ни одного источника")
    missing = [name for name in names if name not in sources]
    if missing:
        raise MissingSource(f"Источники не найдены: {missing}")

    sweep = CombinationSweep(sources=tuple(names))
    gt_objects = gt_objects_from_annotations(ground_truth, mode)
    fusion_cfg = fusion_cfg or FusionConfig()

    for subset in sweep.subsets:
        if len(subset) == 1:
            boxes = list(sources[subset[0]])
        else:
            boxes = fuse_sequence({name: sources[name] for name in subset}, fusion_cfg)
        hypotheses = hypotheses_from_boxes(boxes, mode, intrinsics, plane)
        for setting in settings:
            report = evaluate_sequence(gt_objects, hypotheses, mode, setting, metrics_cfg, frames)
            sweep.rows.append({
                "combination": "+".join(subset),
                "size": len(subset),
                "setting": setting.value,
                **report.as_row(),
            })
        if progress is not None:
            progress(subset)

    logger.info(f"Перебор: источников {sweep.n}, комбинаций {sweep.count}, строк {len(sweep.rows)}")
    return write_reports(sweep.rows)
