"""
Покадровое сопоставление эталона и гипотез и накопление событий MOT.

Соглашение CLEAR-MOT: пара, сопоставленная ранее, сохраняется, пока
остаётся в пределах порога; остальные объекты сопоставляются
венгерским алгоритмом.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from ..constants import Occlusion
from ..lifting import ClassLabel
from ..tracking import associate_hungarian


logger = logging.getLogger(__name__)


class MetricsError(Exception):
    """Базовое исключение для метрик."""
    pass


class EmptyGroundTruth(MetricsError):
    """В последовательности нет эталонных объектов."""
    pass


class NoMatches(MetricsError):
    """Нет ни одного сопоставления - MOTP не определён."""
    pass


class MatchMode(Enum):
    """
    Критерий совпадения.

    Values:
        IMAGE_IOU: IoU 2D-боксов в изображении, стоимость 1 - IoU
        PLANE_DISTANCE: Расстояние на плоскости (м)
    """
    IMAGE_IOU = "image_iou"
    PLANE_DISTANCE = "plane_distance"


@dataclass(frozen=True)
class GtObject:
    """
    Эталонный объект в кадре.

    Attributes:
        frame: Номер кадра
        gt_id: Идентификатор, единый для всех сцен
        box: (left, top, w, h) в пикселях или (x, y) на плоскости
        occlusion: Уровень перекрытия (%)
        class_label: Класс объекта
    """
    frame: int
    gt_id: int
    box: Tuple[float, ...]
    occlusion: int = 0
    class_label: ClassLabel = ClassLabel.PERSON

    def __post_init__(self) -> None:
        if self.occlusion not in Occlusion.LEVELS:
            raise ValueError(f"Уровень перекрытия {self.occlusion} не из {Occlusion.LEVELS}")


@dataclass
class FrameMatch:
    """
    Результат сопоставления одного кадра.

    Attributes:
        frame: Номер кадра
        matches: Тройки (gt_id, hyp_id, стоимость)
        unmatched_gt: Пропуски (FN)
        unmatched_hyp: Ложные срабатывания (FP)
        switches: gt_id со сменой гипотезы (IDs)
    """
    frame: int
    matches: List[Tuple[Hashable, Hashable, float]] = field(default_factory=list)
    unmatched_gt: List[Hashable] = field(default_factory=list)
    unmatched_hyp: List[Hashable] = field(default_factory=list)
    switches: List[Hashable] = field(default_factory=list)


def iou_matrix(gt_boxes: np.ndarray, hyp_boxes: np.ndarray) -> np.ndarray:
    """Попарный IoU боксов (left, top, w, h): (N, M)."""
    a = np.asarray(gt_boxes, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(hyp_boxes, dtype=np.float64).reshape(-1, 4)
    lo = np.maximum(a[:, None, :2], b[None, :, :2])
    hi = np.minimum(a[:, None, :2] + a[:, None, 2:], b[None, :, :2] + b[None, :, 2:])
    inter = np.prod(np.clip(hi - lo, 0.0, None), axis=2)
    union = (a[:, 2] * a[:, 3])[:, None] + (b[:, 2] * b[:, 3])[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(union > 0, inter / union, 0.0)


def cost_matrix(gt_boxes, hyp_boxes, mode: MatchMode, threshold: float) -> np.ndarray:
    """
    Стоимости пар с NaN для пар за порогом.

    IMAGE_IOU: 1 - IoU, допустимо при IoU >= threshold.
    PLANE_DISTANCE: расстояние, допустимо при distance <= threshold.
    """
    if mode == MatchMode.IMAGE_IOU:
        iou = iou_matrix(gt_boxes, hyp_boxes)
        return np.where(iou >= threshold, 1.0 - iou, np.nan)

    a = np.asarray(gt_boxes, dtype=np.float64)
    b = np.asarray(hyp_boxes, dtype=np.float64)
    a = a.reshape(len(a), -1)[:, :2]
    b = b.reshape(len(b), -1)[:, :2]
    distance = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return np.where(distance <= threshold, distance, np.nan)


def match_frame(
    gt_ids: Sequence[Hashable],
    gt_boxes,
    hyp_ids: Sequence[Hashable],
    hyp_boxes,
    mode: MatchMode,
    threshold: float,
    prev_matching: Optional[Dict[Hashable, Hashable]] = None,
    frame: int = 0,
) -> FrameMatch:
    """
    Сопоставление одного кадра.

    Args:
        gt_ids, gt_boxes: Эталонные объекты кадра
        hyp_ids, hyp_boxes: Гипотезы кадра
        mode: Критерий совпадения
        threshold: IoU >= threshold или расстояние <= threshold
        prev_matching: Последняя известная гипотеза каждого gt_id

    Returns:
        FrameMatch: Пары, пропуски, ложные срабатывания и смены ID
    """
    prev_matching = prev_matching or {}
    gt_ids, hyp_ids = list(gt_ids), list(hyp_ids)
    if len(gt_ids) and len(hyp_ids):
        costs = cost_matrix(gt_boxes, hyp_boxes, mode, threshold)
    else:
        costs = np.full((len(gt_ids), len(hyp_ids)), np.nan)

    hyp_index = {h: j for j, h in enumerate(hyp_ids)}
    pairs: List[Tuple[int, int]] = []
    used_gt, used_hyp = set(), set()

    # Продолжение прежних пар в пределах порога
    for i, g in enumerate(gt_ids):
        j = hyp_index.get(prev_matching.get(g))
        if j is not None and j not in used_hyp and np.isfinite(costs[i, j]):
            pairs.append((i, j))
            used_gt.add(i)
            used_hyp.add(j)

    free_gt = [i for i in range(len(gt_ids)) if i not in used_gt]
    free_hyp = [j for j in range(len(hyp_ids)) if j not in used_hyp]
    sub = costs[np.ix_(free_gt, free_hyp)] if free_gt and free_hyp else np.zeros((len(free_gt), len(free_hyp)))
    assignment = associate_hungarian(np.where(np.isfinite(sub), sub, np.inf))
    pairs.extend((free_gt[r], free_hyp[c]) for r, c in assignment.matches)

    matched_gt = {i for i, _ in pairs}
    matched_hyp = {j for _, j in pairs}
    result = FrameMatch(frame=frame)
    for i, j in sorted(pairs):
        g, h = gt_ids[i], hyp_ids[j]
        result.matches.append((g, h, float(costs[i, j])))
        if g in prev_matching and prev_matching[g] != h:
            result.switches.append(g)
    result.unmatched_gt = [g for i, g in enumerate(gt_ids) if i not in matched_gt]
    result.unmatched_hyp = [h for j, h in enumerate(hyp_ids) if j not in matched_hyp]
    return result


class MetricsAccumulator:
    """
    Накопитель событий последовательности.

    Хранит счётчики FP/FN/IDs, покрытие каждого gt по кадрам и матрицу
    совместной встречаемости (gt, hyp) в пределах порога для ID-метрик.
    """

    def __init__(self, mode: MatchMode = MatchMode.IMAGE_IOU, threshold: float = 0.5):
        self.mode = mode
        self.threshold = threshold
        self.frames: List[FrameMatch] = []

        self.fp = 0
        self.fn = 0
        self.id_switches = 0
        self.match_count = 0
        self.cost_sum = 0.0

        self.last_match: Dict[Hashable, Hashable] = {}
        # gt_id -> [(кадр, сопровождается)]
        self.coverage: Dict[Hashable, List[Tuple[int, bool]]] = {}
        self.pair_counts: Counter = Counter()
        self.gt_counts: Counter = Counter()
        self.hyp_counts: Counter = Counter()

    @property
    def total_gt(self) -> int:
        return int(sum(self.gt_counts.values()))

    @property
    def total_hyp(self) -> int:
        return int(sum(self.hyp_counts.values()))

    def update(self, frame: int, gt_ids, gt_boxes, hyp_ids, hyp_boxes) -> FrameMatch:
        """Добавляет кадр."""
        gt_ids, hyp_ids = list(gt_ids), list(hyp_ids)
        result = match_frame(
            gt_ids, gt_boxes, hyp_ids, hyp_boxes,
            self.mode, self.threshold, self.last_match, frame,
        )

        self.fp += len(result.unmatched_hyp)
        self.fn += len(result.unmatched_gt)
        self.id_switches += len(result.switches)
        self.match_count += len(result.matches)
        self.cost_sum += sum(cost for _, _, cost in result.matches)

        matched = {g for g, _, _ in result.matches}
        for g, h, _ in result.matches:
            self.last_match[g] = h
        for g in gt_ids:
            self.coverage.setdefault(g, []).append((frame, g in matched))

        self.gt_counts.update(gt_ids)
        self.hyp_counts.update(hyp_ids)
        if gt_ids and hyp_ids:
            costs = cost_matrix(gt_boxes, hyp_boxes, self.mode, self.threshold)
            for i, j in zip(*np.nonzero(np.isfinite(costs))):
                self.pair_counts[(gt_ids[i], hyp_ids[j])] += 1

        if result.switches:
            logger.debug(f"Кадр {frame}: смены ID у {result.switches}")
        self.frames.append(result)
        return result
