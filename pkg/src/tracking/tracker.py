"""
3D-трекер по карте занятости: прогноз Калмана, венгерское
сопоставление с гейтом и жизненный цикл треков.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from ..config import ClusterConfig, GridConfig, LifecycleConfig
from ..constants import Sources
from ..geometry import CameraIntrinsics, GroundPlane
from ..lifting import BBox3D, DepthMap
from .association import associate_hungarian
from .kalman import TrackState, TrackStatus, initiate_track, kalman_predict, kalman_update
from .occupancy import Cluster, build_occupancy, cluster_occupancy


logger = logging.getLogger(__name__)


@dataclass
class StepResult:
    """
    Результат шага трекера.

    Attributes:
        tracks: Живые треки после шага (удалённые исключены)
        boxes: Выход кадра - подтверждённые треки
        next_id: Следующий свободный идентификатор
        matches: Пары (track_id, индекс кластера)
    """
    tracks: List[TrackState]
    boxes: List[BBox3D]
    next_id: int
    matches: List[tuple] = field(default_factory=list)


def _cluster_extent(cluster: Cluster) -> tuple:
    width, depth = cluster.extent
    return (float(width), float(cluster.height), float(depth))


def track_to_box(track: TrackState, frame_index: int) -> BBox3D:
    """3D-бокс трека в системе плоскости, основание на плоскости."""
    width, height, depth = track.extent
    x, y = track.position
    return BBox3D(
        center=(float(x), float(y), height / 2.0),
        extent=(width, height, depth),
        yaw=0.0,
        confidence=track.hits / (track.hits + track.misses),
        source_id=Sources.OCCUPANCY_3D,
        track_id=track.track_id,
        frame_index=frame_index,
    )


def step_tracker(
    tracks: Sequence[TrackState],
    clusters: Sequence[Cluster],
    dt: float,
    lifecycle_cfg: LifecycleConfig,
    next_id: int = 1,
    frame_index: int = 0,
) -> StepResult:
    """
    Один шаг трекера.

    Треки прогнозируются на dt, сопоставляются с кластерами по евклидову
    расстоянию на плоскости с гейтом lifecycle_cfg.gate. Несопоставленные
    кластеры открывают новые треки, несопоставленные треки копят пропуски.

    Returns:
        StepResult: Новые треки, выход кадра и следующий идентификатор
    """
    cfg = lifecycle_cfg
    predicted = [
        replace(kalman_predict(t, dt, cfg.process_noise), age_frames=t.age_frames + 1)
        for t in tracks
        if t.status != TrackStatus.DELETED
    ]

    if predicted and clusters:
        positions = np.array([t.position for t in predicted])
        centroids = np.array([c.centroid for c in clusters], dtype=np.float64)
        cost = np.linalg.norm(positions[:, None, :] - centroids[None, :, :], axis=2)
    else:
        cost = np.zeros((len(predicted), len(clusters)))
    assignment = associate_hungarian(cost, cfg.gate)

    updated: List[TrackState] = []
    matches = []
    for row, col in assignment.matches:
        cluster = clusters[col]
        track = kalman_update(predicted[row], cluster.centroid, cfg.measurement_noise)
        track = replace(track, hits=track.hits + 1, misses=0, extent=_cluster_extent(cluster))
        if track.status == TrackStatus.TENTATIVE and track.hits >= cfg.confirm_hits:
            track = track.with_status(TrackStatus.CONFIRMED)
            logger.debug(f"Трек {track.track_id} подтверждён")
        updated.append(track)
        matches.append((track.track_id, col))

    for row in assignment.unmatched_rows:
        track = replace(predicted[row], misses=predicted[row].misses + 1)
        if track.misses >= cfg.max_misses:
            logger.debug(f"Трек {track.track_id} удалён после {track.misses} пропусков")
            continue
        updated.append(track)

    for col in assignment.unmatched_cols:
        cluster = clusters[col]
        updated.append(initiate_track(next_id, cluster.centroid, cfg, extent=_cluster_extent(cluster)))
        next_id += 1

    updated.sort(key=lambda t: t.track_id)
    boxes = [
        track_to_box(t, frame_index)
        for t in updated
        if t.status == TrackStatus.CONFIRMED and t.misses <= cfg.max_coast_frames
    ]
    return StepResult(tracks=updated, boxes=boxes, next_id=next_id, matches=matches)


class OccupancyTracker:
    """
    Трекер с состоянием между кадрами.

    Идентификаторы уникальны в пределах последовательности и не
    переиспользуются.
    """

    def __init__(self, lifecycle_cfg: Optional[LifecycleConfig] = None):
        self.cfg = lifecycle_cfg or LifecycleConfig()
        self.tracks: List[TrackState] = []
        self.next_id = 1
        self._last_frame: Optional[int] = None

    def reset(self) -> None:
        self.tracks = []
        self.next_id = 1
        self._last_frame = None

    def step(self, clusters: Sequence[Cluster], frame_index: int, dt: Optional[float] = None) -> List[BBox3D]:
        """
        Обрабатывает кластеры кадра frame_index.

        Если dt не задан, он вычисляется по разнице номеров кадров
        и частоте кадров из конфигурации.
        """
        if dt is None:
            gap = 1 if self._last_frame is None else frame_index - self._last_frame
            if gap <= 0:
                raise ValueError(f"Кадры должны возрастать: {self._last_frame} -> {frame_index}")
            dt = gap / self.cfg.frame_rate

        result = step_tracker(self.tracks, clusters, dt, self.cfg, self.next_id, frame_index)
        self.tracks = result.tracks
        self.next_id = result.next_id
        self._last_frame = frame_index
        return result.boxes


def track_sequence(
    depth_maps: Sequence[DepthMap],
    intrinsics: CameraIntrinsics,
    plane: GroundPlane,
    grid_cfg: Optional[GridConfig] = None,
    cluster_cfg: Optional[ClusterConfig] = None,
    lifecycle_cfg: Optional[LifecycleConfig] = None,
    frame_indices: Optional[Sequence[int]] = None,
    timestamps: Optional[Sequence[float]] = None,
) -> List[BBox3D]:
    """
    Трекинг по последовательности карт глубины.

    Args:
        timestamps: Время кадров (с). Если задано, шаг предсказания
            равен разнице соседних меток; иначе берётся из частоты кадров

    Returns:
        List[BBox3D]: Выход всех кадров с source_id "occupancy3d"

    Raises:
        ValueError: Длины не совпадают или метки времени не возрастают
    """
    grid_cfg = grid_cfg or GridConfig()
    cluster_cfg = cluster_cfg or ClusterConfig()
    tracker = OccupancyTracker(lifecycle_cfg)
    frames = list(frame_indices) if frame_indices is not None else list(range(1, len(depth_maps) + 1))
    if len(frames) != len(depth_maps):
        raise ValueError("Число номеров кадров не совпадает с числом карт глубины")

    steps: List[Optional[float]] = [None] * len(frames)
    if timestamps is not None:
        times = np.asarray(timestamps, dtype=np.float64)
        if len(times) != len(depth_maps):
            raise ValueError("Число меток времени не совпадает с числом карт глубины")
        deltas = np.diff(times)
        if np.any(deltas <= 0):
            raise ValueError("Метки времени должны строго возрастать")
        steps[1:] = [float(delta) for delta in deltas]

    output: List[BBox3D] = []
    for frame, depth, dt in zip(frames, depth_maps, steps):
        grid = build_occupancy(depth, intrinsics, plane, grid_cfg)
        clusters = cluster_occupancy(
            grid,
            cluster_cfg.min_mass,
            cluster_cfg.person_extent_prior,
            evidence_threshold=cluster_cfg.evidence_threshold,
            surface_compensation=cluster_cfg.surface_compensation,
        )
        output.extend(tracker.step(clusters, frame, dt=dt))

    logger.info(f"3D-трекинг: кадров {len(frames)}, боксов {len(output)}, треков {tracker.next_id - 1}")
    return output
