"""
Итоговые метрики MOT по накопителю и оценка последовательности.
"""

import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from ..config import MetricsConfig
from ..constants import MetricColumns, Occlusion
from .accumulator import (
    EmptyGroundTruth,
    GtObject,
    MatchMode,
    MetricsAccumulator,
    NoMatches,
    match_frame,
)


logger = logging.getLogger(__name__)


class TaskSetting(Enum):
    """
    Настройка задачи оценки.

    Values:
        ALL: Все размеченные объекты
        PEDS: Люди с видимостью не менее 25%
    """
    ALL = "ALL"
    PEDS = "PEDS"


@dataclass(frozen=True)
class Hypothesis:
    """Гипотеза трекера в кадре: box как у GtObject того же режима."""
    frame: int
    hyp_id: Hashable
    box: Tuple[float, ...]


@dataclass(frozen=True)
class CoverageStats:
    gt: int
    mostly_tracked: int
    partially_tracked: int
    mostly_lost: int
    fragmentations: int


@dataclass(frozen=True)
class MetricsReport:
    """
    Отчёт с метриками в порядке колонок таблицы.

    Доли в [0, 1]. MOTA и MOTP равны NaN, если не определены.
    """
    IDF1: float
    IDP: float
    IDR: float
    Rcll: float
    Prcn: float
    GT: int
    MT: int
    PT: int
    ML: int
    FP: int
    FN: int
    IDs: int
    FM: int
    MOTA: float
    MOTP: float
    motp_mode: str = MatchMode.IMAGE_IOU.value

    def as_row(self) -> Dict[str, object]:
        """Колонки таблицы и режим MOTP."""
        values = asdict(self)
        row = {column: values[column] for column in MetricColumns.ORDER}
        row["MOTP_mode"] = self.motp_mode
        return row


def compute_mota(acc: MetricsAccumulator) -> float:
    """
    MOTA = 1 - (FP + FN + IDs) / число эталонных объектов по кадрам.

    Raises:
        EmptyGroundTruth: Если эталонных объектов нет
    """
    total = acc.total_gt
    if total == 0:
        raise EmptyGroundTruth("MOTA не определена: нет эталонных объектов")
    return 1.0 - (acc.fp + acc.fn + acc.id_switches) / total


def compute_motp(acc: MetricsAccumulator) -> float:
    """
    Средняя стоимость сопоставленных пар: 1 - IoU или метры.

    Raises:
        NoMatches: Если сопоставлений нет
    """
    if acc.match_count == 0:
        raise NoMatches("MOTP не определена: нет сопоставлений")
    return acc.cost_sum / acc.match_count


def compute_id_metrics(acc: MetricsAccumulator) -> Tuple[float, float, float]:
    """
    IDF1, IDP, IDR по глобальному сопоставлению траекторий.

    Стоимость пары траекторий - число кадров без совпадения
    (gt_count + hyp_count - 2 * совпадения), поэтому минимум стоимости
    достигается при максимуме совпадающих кадров (IDTP).
    """
    gt_ids = sorted(acc.gt_counts, key=repr)
    hyp_ids = sorted(acc.hyp_counts, key=repr)

    idtp = 0.0
    if gt_ids and hyp_ids:
        overlap = np.array([[acc.pair_counts.get((g, h), 0) for h in hyp_ids] for g in gt_ids], dtype=np.float64)
        rows, cols = linear_sum_assignment(overlap, maximize=True)
        idtp = float(overlap[rows, cols].sum())

    idfn = acc.total_gt - idtp
    idfp = acc.total_hyp - idtp
    idp = idtp / (idtp + idfp) if idtp + idfp > 0 else 0.0
    idr = idtp / (idtp + idfn) if idtp + idfn > 0 else 0.0
    denominator = 2 * idtp + idfp + idfn
    idf1 = 2 * idtp / denominator if denominator > 0 else 0.0
    return idf1, idp, idr


def compute_coverage(
    acc: MetricsAccumulator,
    mostly_tracked_ratio: float = 0.8,
    mostly_lost_ratio: float = 0.2,
) -> CoverageStats:
    """
    GT, MT, PT, ML и FM.

    MT - сопровождается не менее 80% времени жизни, ML - менее 20%,
    PT - остальные (20% относится к PT). FM - число возобновлений
    сопровождения после перерыва.
    """
    mt = pt = ml = fm = 0
    for frames in acc.coverage.values():
        history = [tracked for _, tracked in sorted(frames)]
        ratio = sum(history) / len(history)
        if ratio >= mostly_tracked_ratio:
            mt += 1
        elif ratio < mostly_lost_ratio:
            ml += 1
        else:
            pt += 1

        was_tracked = False
        interrupted = False
        for tracked in history:
            if tracked:
                if was_tracked and interrupted:
                    fm += 1
                was_tracked, interrupted = True, False
            elif was_tracked:
                interrupted = True

    return CoverageStats(
        gt=len(acc.coverage),
        mostly_tracked=mt,
        partially_tracked=pt,
        mostly_lost=ml,
        fragmentations=fm,
    )


def summarize(acc: MetricsAccumulator, cfg: Optional[MetricsConfig] = None) -> MetricsReport:
    """Собирает отчёт по накопителю."""
    cfg = cfg or MetricsConfig()
    coverage = compute_coverage(acc, cfg.mostly_tracked_ratio, cfg.mostly_lost_ratio)
    idf1, idp, idr = compute_id_metrics(acc)

    try:
        mota = compute_mota(acc)
    except EmptyGroundTruth:
        mota = math.nan
    try:
        motp = compute_motp(acc)
    except NoMatches:
        motp = math.nan

    tp = acc.match_count
    return MetricsReport(
        IDF1=idf1,
        IDP=idp,
        IDR=idr,
        Rcll=tp / acc.total_gt if acc.total_gt else 0.0,
        Prcn=tp / (tp + acc.fp) if tp + acc.fp else 0.0,
        GT=coverage.gt,
        MT=coverage.mostly_tracked,
        PT=coverage.partially_tracked,
        ML=coverage.mostly_lost,
        FP=acc.fp,
        FN=acc.fn,
        IDs=acc.id_switches,
        FM=coverage.fragmentations,
        MOTA=mota,
        MOTP=motp,
        motp_mode=acc.mode.value,
    )


def filter_ground_truth(
    objects: Iterable[GtObject],
    setting: TaskSetting,
) -> Tuple[List[GtObject], List[GtObject]]:
    """
    Делит эталон на оцениваемые и исключённые объекты.

    PEDS оставляет людей с перекрытием строго меньше 75%.

    Returns:
        Tuple: (оцениваемые, исключённые)
    """
    kept: List[GtObject] = []
    excluded: List[GtObject] = []
    for obj in objects:
        if setting == TaskSetting.ALL or (
            obj.class_label.is_human and obj.occlusion < Occlusion.PEDS_MAX_EXCLUSIVE
        ):
            kept.append(obj)
        else:
            excluded.append(obj)
    return kept, excluded


def _boxes(items) -> np.ndarray:
    return np.array([item.box for item in items], dtype=np.float64)


def evaluate_sequence(
    gt_objects: Sequence[GtObject],
    hypotheses: Sequence[Hypothesis],
    mode: MatchMode = MatchMode.IMAGE_IOU,
    setting: TaskSetting = TaskSetting.ALL,
    cfg: Optional[MetricsConfig] = None,
    frames: Optional[Iterable[int]] = None,
) -> MetricsReport:
    """
    Оценка последовательности.

    Гипотезы, сопоставленные в кадре с исключённым эталоном, удаляются
    и не дают ни FN, ни FP. Если frames задан, оцениваются только эти
    кадры (разметка есть не на каждом кадре).
    """
    cfg = cfg or MetricsConfig()
    threshold = cfg.iou_threshold if mode == MatchMode.IMAGE_IOU else cfg.distance_threshold
    kept, excluded = filter_ground_truth(gt_objects, setting)

    by_frame_gt: Dict[int, List[GtObject]] = defaultdict(list)
    by_frame_excluded: Dict[int, List[GtObject]] = defaultdict(list)
    by_frame_hyp: Dict[int, List[Hypothesis]] = defaultdict(list)
    for obj in kept:
        by_frame_gt[obj.frame].append(obj)
    for obj in excluded:
        by_frame_excluded[obj.frame].append(obj)
    for hyp in hypotheses:
        by_frame_hyp[hyp.frame].append(hyp)

    if frames is None:
        evaluated = sorted({o.frame for o in gt_objects} | set(by_frame_hyp))
    else:
        evaluated = sorted(set(frames))

    acc = MetricsAccumulator(mode, threshold)
    removed = 0
    for frame in evaluated:
        gts, hyps = by_frame_gt.get(frame, []), by_frame_hyp.get(frame, [])
        distractors = by_frame_excluded.get(frame, [])
        if distractors and hyps:
            everyone = gts + distractors
            full = match_frame(
                [id(o) for o in everyone], _boxes(everyone),
                list(range(len(hyps))), _boxes(hyps),
                mode, threshold, frame=frame,
            )
            distractor_ids = {id(o) for o in distractors}
            drop = {j for g, j, _ in full.matches if g in distractor_ids}
            removed += len(drop)
            hyps = [h for j, h in enumerate(hyps) if j not in drop]

        acc.update(
            frame,
            [o.gt_id for o in gts], _boxes(gts),
            [h.hyp_id for h in hyps], _boxes(hyps),
        )

    if removed:
        logger.debug(f"{setting.value}: удалено гипотез на исключённых объектах {removed}")
    return summarize(acc, cfg)


def write_reports(
    rows: Sequence[Mapping[str, object]],
    csv_path: Optional[Path] = None,
    json_path: Optional[Path] = None,
) -> pd.DataFrame:
    """
    Сохраняет строки отчёта: ключевые колонки, затем метрики по порядку таблицы.

    Строка - словарь с ключами (например scene, setting, combination)
    и колонками MetricsReport.as_row().
    """
    frame = pd.DataFrame(list(rows))
    metric_columns = [c for c in (*MetricColumns.ORDER, "MOTP_mode") if c in frame.columns]
    key_columns = [c for c in frame.columns if c not in metric_columns]
    frame = frame[key_columns + metric_columns]

    if csv_path is not None:
        Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(csv_path, index=False)
    if json_path is not None:
        Path(json_path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_json(json_path, orient="records", indent=2)
    return frame
