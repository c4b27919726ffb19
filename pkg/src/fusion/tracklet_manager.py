"""
Фьюжн наблюдений нескольких трекеров в согласованные треки.

Каждый входной трек рассматривается как треклет объекта. Наблюдение
присоединяется к треклету, если пара (трекер, трек) уже ему принадлежит,
иначе - к треклету с наибольшим перекрытием (IoU или IoE выше порога),
иначе открывает новый треклет с новым согласованным идентификатором.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from ..config import FusionConfig
from ..constants import Sources
from ..lifting import BBox3D
from .overlap import FusionError, OutOfOrderFrame, overlap_3d


logger = logging.getLogger(__name__)

MemberKey = Tuple[str, int]


@dataclass(frozen=True)
class Detection3D:
    """
    Наблюдение одного источника в одном кадре.

    Attributes:
        box: 3D-бокс в системе плоскости
        tracker_id: Источник (трекер)
        track_id: Идентификатор трека внутри источника
        frame_index: Номер кадра
    """
    box: BBox3D
    tracker_id: str
    track_id: int
    frame_index: int

    @property
    def key(self) -> MemberKey:
        return (self.tracker_id, self.track_id)

    @classmethod
    def from_box(cls, box: BBox3D, tracker_id: Optional[str] = None) -> "Detection3D":
        """Наблюдение из бокса трека; tracker_id по умолчанию - source_id бокса."""
        if box.track_id is None:
            raise FusionError(f"Бокс кадра {box.frame_index} без track_id нельзя фьюзить")
        return cls(
            box=box,
            tracker_id=tracker_id if tracker_id is not None else box.source_id,
            track_id=int(box.track_id),
            frame_index=box.frame_index,
        )


@dataclass
class Tracklet:
    """
    Согласованный трек.

    Attributes:
        fused_id: Согласованный идентификатор
        members: Пары (tracker_id, track_id), вошедшие в треклет
        observations: Наблюдения в порядке добавления
        last_update: Кадр последнего наблюдения
    """
    fused_id: int
    members: Set[MemberKey] = field(default_factory=set)
    observations: List[Detection3D] = field(default_factory=list)
    last_update: int = -1

    @property
    def latest_box(self) -> BBox3D:
        return self.observations[-1].box

    @property
    def frames(self) -> List[int]:
        """Кадры истории (строго возрастают)."""
        return sorted({obs.frame_index for obs in self.observations})

    def observations_at(self, frame: int) -> List[Detection3D]:
        return [obs for obs in self.observations if obs.frame_index == frame]

    def append(self, det: Detection3D) -> None:
        self.members.add(det.key)
        self.observations.append(det)
        self.last_update = det.frame_index


class TrackletManager:
    """
    Менеджер живых треклетов одной последовательности.

    Кадры подаются в неубывающем порядке. Треклеты без обновлений дольше
    staleness_limit кадров выводятся из оборота и больше не принимают
    наблюдений.
    """

    def __init__(
        self,
        iou_threshold: float = 0.3,
        ioe_threshold: float = 0.7,
        staleness_limit: int = 15,
    ):
        for name, value in (("iou_threshold", iou_threshold), ("ioe_threshold", ioe_threshold)):
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} должен быть в (0, 1], получено {value}")

        self.iou_threshold = iou_threshold
        self.ioe_threshold = ioe_threshold
        self.staleness_limit = staleness_limit

        self.tracklets: Dict[int, Tracklet] = {}
        self.retired: List[Tracklet] = []
        self.current_frame: Optional[int] = None
        self.tie_events = 0
        self._next_fused_id = 1
        self._members: Dict[MemberKey, int] = {}

    @classmethod
    def from_config(cls, cfg: FusionConfig) -> "TrackletManager":
        return cls(cfg.iou_threshold, cfg.ioe_threshold, cfg.staleness_limit)

    def all_tracklets(self) -> List[Tracklet]:
        """Живые и выведенные треклеты по fused_id."""
        return sorted([*self.tracklets.values(), *self.retired], key=lambda t: t.fused_id)

    def _advance(self, frame: int) -> None:
        if self.current_frame is not None and frame < self.current_frame:
            raise OutOfOrderFrame(f"Кадр {frame} после кадра {self.current_frame}")
        self.current_frame = frame

    def _new_tracklet(self, det: Detection3D) -> Tracklet:
        tracklet = Tracklet(fused_id=self._next_fused_id)
        self._next_fused_id += 1
        self.tracklets[tracklet.fused_id] = tracklet
        return tracklet

    def _attach(self, tracklet: Tracklet, det: Detection3D) -> int:
        tracklet.append(det)
        self._members[det.key] = tracklet.fused_id
        return tracklet.fused_id

    def retire_stale(self, frame: int) -> List[int]:
        """Выводит треклеты, не обновлявшиеся дольше staleness_limit кадров."""
        stale = [
            fid for fid, t in self.tracklets.items()
            if frame - t.last_update > self.staleness_limit
        ]
        for fid in stale:
            tracklet = self.tracklets.pop(fid)
            for key in tracklet.members:
                if self._members.get(key) == fid:
                    del self._members[key]
            self.retired.append(tracklet)
        if stale:
            logger.debug(f"Кадр {frame}: выведены треклеты {stale}")
        return stale


def already_in_history(mgr: TrackletManager, det: Detection3D) -> Optional[int]:
    """fused_id живого треклета, которому принадлежит пара (tracker_id, track_id)."""
    return mgr._members.get(det.key)


def _best_overlap(mgr: TrackletManager, det: Detection3D) -> Tuple[Optional[Tracklet], float, float]:
    best: Optional[Tracklet] = None
    best_score = 0.0
    best_iou = best_ioe = 0.0

    for fid in sorted(mgr.tracklets):
        tracklet = mgr.tracklets[fid]
        # Трекер не сообщает об одном объекте дважды за кадр
        if any(obs.tracker_id == det.tracker_id for obs in tracklet.observations_at(det.frame_index)):
            continue
        iou, ioe = overlap_3d(det.box, tracklet.latest_box)
        score = max(iou, ioe)
        if score > best_score:
            best, best_score, best_iou, best_ioe = tracklet, score, iou, ioe
        elif score > 0.0 and score == best_score:
            mgr.tie_events += 1
            logger.debug(f"Равное перекрытие {score:.3f}: треклеты {best.fused_id} и {fid}, "
                         f"выбран {best.fused_id}")

    return best, best_iou, best_ioe


def fuse_observation(mgr: TrackletManager, det: Detection3D) -> int:
    """
    Присоединяет наблюдение к треклету.

    Returns:
        int: fused_id треклета, принявшего наблюдение

    Raises:
        OutOfOrderFrame: Кадр наблюдения меньше текущего кадра менеджера
    """
    mgr._advance(det.frame_index)

    fid = already_in_history(mgr, det)
    if fid is not None:
        return mgr._attach(mgr.tracklets[fid], det)

    best, iou, ioe = _best_overlap(mgr, det)
    if best is not None and (iou >= mgr.iou_threshold or ioe >= mgr.ioe_threshold):
        logger.debug(f"{det.key} -> треклет {best.fused_id} (IoU={iou:.3f}, IoE={ioe:.3f})")
        return mgr._attach(best, det)

    tracklet = mgr._new_tracklet(det)
    logger.debug(f"{det.key} -> новый треклет {tracklet.fused_id}")
    return mgr._attach(tracklet, det)


def _fused_box(tracklet: Tracklet, observations: Sequence[Detection3D], frame: int) -> BBox3D:
    if len(observations) == 1:
        return replace(
            observations[0].box,
            source_id=Sources.FUSED,
            track_id=tracklet.fused_id,
            frame_index=frame,
        )

    confidences = np.array([obs.box.confidence for obs in observations], dtype=np.float64)
    weights = confidences if confidences.sum() > 0 else np.ones_like(confidences)
    centers = np.array([obs.box.center for obs in observations], dtype=np.float64)
    extents = np.array([obs.box.extent for obs in observations], dtype=np.float64)
    center = np.average(centers, axis=0, weights=weights)
    extent = np.average(extents, axis=0, weights=weights)
    strongest = observations[int(np.argmax(confidences))].box

    return BBox3D(
        center=tuple(float(v) for v in center),
        extent=tuple(float(v) for v in extent),
        yaw=0.0,
        confidence=float(confidences.max()),
        source_id=Sources.FUSED,
        track_id=tracklet.fused_id,
        frame_index=frame,
        class_label=strongest.class_label,
    )


def fuse_frame(mgr: TrackletManager, detections: Iterable[Detection3D], frame: int) -> List[BBox3D]:
    """
    Фьюжн всех наблюдений одного кадра.

    Наблюдения обрабатываются в каноническом порядке (tracker_id, track_id),
    поэтому результат не зависит от порядка прихода источников. На каждый
    треклет с наблюдениями этого кадра выдаётся один бокс - среднее центров
    и размеров, взвешенное уверенностью.

    Raises:
        OutOfOrderFrame: Кадр меньше текущего
    """
    ordered = sorted(detections, key=lambda d: d.key)
    for det in ordered:
        if det.frame_index != frame:
            raise FusionError(f"Наблюдение кадра {det.frame_index} подано в кадр {frame}")
    mgr._advance(frame)

    touched: Dict[int, List[Detection3D]] = defaultdict(list)
    for det in ordered:
        touched[fuse_observation(mgr, det)].append(det)

    output = [
        _fused_box(mgr.tracklets[fid], touched[fid], frame)
        for fid in sorted(touched)
    ]
    mgr.retire_stale(frame)
    return output


def fuse_sequence(
    sources: Mapping[str, Sequence[BBox3D]],
    cfg: Optional[FusionConfig] = None,
    manager: Optional[TrackletManager] = None,
) -> List[BBox3D]:
    """
    Фьюжн последовательности: источники по tracker_id -> боксы всех кадров.

    Кадры обрабатываются по возрастанию объединения кадров всех источников.
    """
    mgr = manager or TrackletManager.from_config(cfg or FusionConfig())

    by_frame: Dict[int, List[Detection3D]] = defaultdict(list)
    for tracker_id, boxes in sources.items():
        for box in boxes:
            by_frame[box.frame_index].append(Detection3D.from_box(box, tracker_id))

    output: List[BBox3D] = []
    for frame in sorted(by_frame):
        output.extend(fuse_frame(mgr, by_frame[frame], frame))

    logger.info(
        f"Фьюжн: источников {len(sources)}, кадров {len(by_frame)}, "
        f"треклетов {len(mgr.all_tracklets())}, ничьих {mgr.tie_events}"
    )
    return output
