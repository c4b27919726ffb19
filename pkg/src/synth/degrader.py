"""
Деградация эталона в выход "детектора-трекера": пропуски, ложные
срабатывания, шум локализации, смены идентификаторов и периодические
выпадения кадров.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..formats import AnnotationRecord, MotRecord
from ..lifting import BBox3D


logger = logging.getLogger(__name__)

T = TypeVar("T")

# Ложные срабатывания в 3D: размеры человека
_FP_EXTENT = (0.5, 1.7, 0.4)


@dataclass(frozen=True)
class DegraderConfig:
    """
    Параметры деградации одного источника.

    Attributes:
        miss_probability: Вероятность пропуска наблюдения
        fp_rate: Среднее число ложных срабатываний на кадр (Пуассон)
        noise_px: СКО шума бокса в пикселях (2D)
        noise_m: СКО шума центра в метрах (3D)
        id_switch_probability: Вероятность смены id на границе кадров
        seed: Зерно источника
        dropout_period, dropout_length, dropout_phase: Кадр выпадает целиком,
            если (frame - phase) mod period < length; period 0 - без выпадений
        source_id: Идентификатор источника в выходе
    """
    miss_probability: float = 0.0
    fp_rate: float = 0.0
    noise_px: float = 0.0
    noise_m: float = 0.0
    id_switch_probability: float = 0.0
    seed: int = 0
    dropout_period: int = 0
    dropout_length: int = 0
    dropout_phase: int = 0
    source_id: str = "synth"

    def __post_init__(self) -> None:
        for name in ("miss_probability", "id_switch_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} вне [0, 1]: {value}")
        if self.fp_rate < 0 or self.noise_px < 0 or self.noise_m < 0:
            raise ValueError("fp_rate и шумы должны быть >= 0")
        if self.dropout_period < 0 or not 0 <= self.dropout_length <= max(self.dropout_period, 0):
            raise ValueError("Некорректные параметры выпадений")

    def dropped(self, frame: int) -> bool:
        if self.dropout_period == 0:
            return False
        return (frame - self.dropout_phase) % self.dropout_period < self.dropout_length


def complementary_presets(
    n: int,
    block: int = 3,
    miss_probability: float = 0.05,
    noise_m: float = 0.05,
    noise_px: float = 2.0,
    high_fp_source: Optional[int] = 0,
    fp_rate: float = 0.1,
    high_fp_rate: float = 1.0,
    seed: int = 0,
) -> List[DegraderConfig]:
    """
    n источников с непересекающимися выпадениями: источник k теряет
    блоки по block кадров со сдвигом k * block в периоде n * block.

    Источник high_fp_source получает повышенную частоту ложных срабатываний.
    """
    if n < 1:
        raise ValueError("n должен быть >= 1")
    presets = []
    for k in range(n):
        presets.append(DegraderConfig(
            miss_probability=miss_probability,
            fp_rate=high_fp_rate if k == high_fp_source else fp_rate,
            noise_px=noise_px,
            noise_m=noise_m,
            seed=seed * 1009 + k,
            dropout_period=n * block if n > 1 else 0,
            dropout_length=block if n > 1 else 0,
            dropout_phase=k * block,
            source_id=f"src{k + 1}",
        ))
    return presets


def _degrade_stream(
    items: Sequence[Tuple[int, int, T]],
    cfg: DegraderConfig,
    perturb: Callable[[T, np.random.Generator], T],
    spawn_false: Callable[[int, np.random.Generator], T],
    frames: Optional[Sequence[int]] = None,
) -> List[Tuple[int, int, T]]:
    """
    Общая схема деградации потока (кадр, id, наблюдение).

    Порядок обработки и потребления случайных чисел фиксирован:
    кадры по возрастанию, внутри кадра - по id.
    """
    rng = np.random.default_rng(cfg.seed)
    by_frame: Dict[int, List[Tuple[int, T]]] = {}
    for frame, object_id, payload in items:
        by_frame.setdefault(frame, []).append((object_id, payload))

    all_frames = sorted(set(frames) | set(by_frame)) if frames is not None else sorted(by_frame)
    next_id = max((object_id for _, object_id, _ in items), default=0) + 1
    identity: Dict[int, int] = {}

    output: List[Tuple[int, int, T]] = []
    for frame in all_frames:
        entries = sorted(by_frame.get(frame, []), key=lambda e: e[0])

        for object_id, _ in entries:
            if object_id not in identity:
                identity[object_id] = object_id
            elif rng.random() < cfg.id_switch_probability:
                identity[object_id] = next_id
                next_id += 1

        dropped = cfg.dropped(frame)
        for object_id, payload in entries:
            missed = rng.random() < cfg.miss_probability
            perturbed = perturb(payload, rng)
            if not (dropped or missed):
                output.append((frame, identity[object_id], perturbed))

        false_count = int(rng.poisson(cfg.fp_rate))
        for _ in range(false_count):
            payload = spawn_false(frame, rng)
            if not dropped:
                output.append((frame, next_id, payload))
            next_id += 1

    return output


def degrade(
    gt_tracks: Sequence[BBox3D],
    cfg: DegraderConfig,
    area: Optional[Tuple[float, float, float, float]] = None,
) -> List[BBox3D]:
    """
    Деградирует истинные 3D-треки.

    Args:
        gt_tracks: Истинные боксы всех кадров
        cfg: Параметры источника
        area: (x_min, y_min, x_max, y_max) для ложных срабатываний;
            по умолчанию - охват истинных треков с запасом 1 м

    Returns:
        List[BBox3D]: Боксы с source_id = cfg.source_id
    """
    if area is None:
        if gt_tracks:
            xs = [b.center[0] for b in gt_tracks]
            ys = [b.center[1] for b in gt_tracks]
            area = (min(xs) - 1.0, min(ys) - 1.0, max(xs) + 1.0, max(ys) + 1.0)
        else:
            area = (-3.0, 4.0, 3.0, 12.0)

    def perturb(box: BBox3D, rng: np.random.Generator) -> BBox3D:
        dx, dy = rng.normal(0.0, cfg.noise_m, size=2)
        x, y, z = box.center
        return replace(box, center=(x + float(dx), y + float(dy), z))

    def spawn_false(frame: int, rng: np.random.Generator) -> BBox3D:
        x = rng.uniform(area[0], area[2])
        y = rng.uniform(area[1], area[3])
        return BBox3D(
            center=(float(x), float(y), _FP_EXTENT[1] / 2.0),
            extent=_FP_EXTENT,
            confidence=float(rng.uniform(0.3, 0.7)),
            frame_index=frame,
        )

    items = [(b.frame_index, int(b.track_id), b) for b in gt_tracks]
    frames = sorted({b.frame_index for b in gt_tracks})
    degraded = _degrade_stream(items, cfg, perturb, spawn_false, frames)
    result = [
        replace(box, source_id=cfg.source_id, track_id=object_id, frame_index=frame)
        for frame, object_id, box in degraded
    ]
    logger.debug(f"{cfg.source_id}: {len(gt_tracks)} -> {len(result)} боксов")
    return result


def degrade_detections(
    annotations: Sequence[AnnotationRecord],
    cfg: DegraderConfig,
    image_size: Tuple[int, int],
    frames: Optional[Sequence[int]] = None,
) -> List[MotRecord]:
    """
    Деградирует эталонную 2D-разметку в записи MOT.

    Args:
        annotations: Эталон
        cfg: Параметры источника
        image_size: (width, height) изображения
        frames: Кадры последовательности (ложные срабатывания и в кадрах без эталона)
    """
    width, height = image_size
    sizes = [(a.box[2], a.box[3]) for a in annotations] or [(30.0, 80.0)]
    mean_w = float(np.mean([s[0] for s in sizes]))
    mean_h = float(np.mean([s[1] for s in sizes]))

    def clamp(left: float, top: float, w: float, h: float) -> Tuple[float, float, float, float]:
        left = float(np.clip(left, 0.0, width - 1.0))
        top = float(np.clip(top, 0.0, height - 1.0))
        w = float(np.clip(w, 1.0, width - left))
        h = float(np.clip(h, 1.0, height - top))
        return left, top, w, h

    def perturb(box: Tuple[float, ...], rng: np.random.Generator) -> Tuple[float, ...]:
        noise = rng.normal(0.0, cfg.noise_px, size=4)
        return clamp(*(np.asarray(box) + noise))

    def spawn_false(frame: int, rng: np.random.Generator) -> Tuple[float, ...]:
        left = rng.uniform(0.0, max(1.0, width - mean_w))
        top = rng.uniform(0.0, max(1.0, height - mean_h))
        return clamp(left, top, mean_w, mean_h)

    items = [(a.frame, a.object_id, tuple(a.box)) for a in annotations]
    degraded = _degrade_stream(items, cfg, perturb, spawn_false, frames)
    return [
        MotRecord(frame=frame, id=object_id, bb_left=b[0], bb_top=b[1], bb_width=b[2], bb_height=b[3], conf=1.0)
        for frame, object_id, b in degraded
    ]
