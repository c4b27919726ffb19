"""
Рендер синтетической последовательности: карта глубины трассировкой
лучей (плоскость + боксы агентов), эталонная 2D-разметка с уровнями
перекрытия и эталонные 3D-треки.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..constants import CameraViews, Occlusion
from ..formats import AnnotationRecord
from ..geometry import from_ground_frame, project_points
from ..lifting import BBox3D, DepthMap, project_bbox3d
from .scenario import AgentOutsideFrustum, SynthScenario


logger = logging.getLogger(__name__)


@dataclass(eq=False)
class RenderedFrame:
    """Один кадр: глубина, разметка и истинные 3D-боксы."""
    frame: int
    depth: DepthMap
    annotations: List[AnnotationRecord] = field(default_factory=list)
    tracks: List[BBox3D] = field(default_factory=list)


@dataclass(eq=False)
class SynthSequence:
    """Результат рендера."""
    scenario: SynthScenario
    frames: List[RenderedFrame]

    @property
    def depth_maps(self) -> List[DepthMap]:
        return [f.depth for f in self.frames]

    @property
    def annotations(self) -> List[AnnotationRecord]:
        return [a for f in self.frames for a in f.annotations]

    @property
    def gt_tracks(self) -> List[BBox3D]:
        return [t for f in self.frames for t in f.tracks]


def camera_rays(scenario: SynthScenario) -> np.ndarray:
    """
    Лучи пикселей (H*W, 3) в системе камеры с z = 1.

    Параметр луча равен глубине точки.
    """
    k = scenario.intrinsics
    vs, us = np.mgrid[0:k.height, 0:k.width]
    return np.stack([
        ((us - k.cx) / k.fx).ravel(),
        ((vs - k.cy) / k.fy).ravel(),
        np.ones(k.height * k.width),
    ], axis=1)


def _slab_hits(origin: np.ndarray, directions: np.ndarray, box: BBox3D) -> np.ndarray:
    """Глубина входа луча в бокс (inf при промахе)."""
    safe = np.where(np.abs(directions) < 1e-12, 1e-12, directions)
    t1 = (box.min_corner - origin) / safe
    t2 = (box.max_corner - origin) / safe
    t_near = np.minimum(t1, t2).max(axis=1)
    t_far = np.maximum(t1, t2).min(axis=1)
    hit = (t_near <= t_far) & (t_near > 0)
    return np.where(hit, t_near, np.inf)


def check_frustum(scenario: SynthScenario) -> None:
    """
    Raises:
        AgentOutsideFrustum: Вершина живого агента за камерой или вне изображения
    """
    k = scenario.intrinsics
    plane = scenario.plane
    for frame in scenario.frames:
        for box in scenario.boxes(frame):
            corners = from_ground_frame(plane, box.corners())
            if np.any(corners[:, 2] <= 0):
                raise AgentOutsideFrustum(f"Агент {box.track_id} за камерой в кадре {frame}")
            pixels = project_points(k, corners)
            inside = (pixels[:, 0] >= 0) & (pixels[:, 0] <= k.width) & (pixels[:, 1] >= 0) & (pixels[:, 1] <= k.height)
            if not np.all(inside):
                raise AgentOutsideFrustum(f"Агент {box.track_id} вне изображения в кадре {frame}")


def _occlusion_level(visible: int, silhouette: int) -> int:
    if silhouette == 0:
        return Occlusion.LEVELS[-1]
    hidden = 1.0 - visible / silhouette
    levels = np.asarray(Occlusion.LEVELS)
    return int(levels[np.argmin(np.abs(levels - hidden * 100.0))])


def render_frame(scenario: SynthScenario, frame: int, rays: np.ndarray) -> RenderedFrame:
    k = scenario.intrinsics
    plane = scenario.plane

    # Лучи в системе плоскости; камера в (0, 0, h)
    origin = np.array([0.0, 0.0, plane.camera_height])
    directions = rays @ plane.rotation.T

    with np.errstate(divide="ignore", invalid="ignore"):
        ground = np.where(directions[:, 2] < 0, -origin[2] / directions[:, 2], np.inf)

    boxes = scenario.boxes(frame)
    agent_depths = np.stack([_slab_hits(origin, directions, b) for b in boxes]) if boxes else np.zeros((0, len(rays)))
    all_depths = np.vstack([ground[None, :], agent_depths])
    nearest = all_depths.argmin(axis=0)
    depth = all_depths.min(axis=0)

    valid = np.isfinite(depth)
    if scenario.invalid_fraction > 0:
        rng = np.random.default_rng([scenario.rng_seed, frame])
        valid &= rng.random(len(depth)) >= scenario.invalid_fraction
    depth_map = DepthMap(
        depth=np.where(valid, depth, 0.0).reshape(k.height, k.width),
        valid=valid.reshape(k.height, k.width),
    )

    annotations: List[AnnotationRecord] = []
    for index, box in enumerate(boxes):
        silhouette = int(np.isfinite(agent_depths[index]).sum())
        visible = int(np.count_nonzero(nearest == index + 1))
        left, top, width, height = project_bbox3d(box, k, plane)
        annotations.append(AnnotationRecord(
            frame=frame,
            object_id=int(box.track_id),
            class_label=box.class_label,
            box=(left, top, width, height),
            occlusion=_occlusion_level(visible, silhouette),
            camera_view=CameraViews.LEFT_RIG,
            ground_position=(float(box.center[0]), float(box.center[1])),
        ))

    return RenderedFrame(frame=frame, depth=depth_map, annotations=annotations, tracks=boxes)


def render_scenario(scenario: SynthScenario) -> SynthSequence:
    """
    Рендерит все кадры сценария.

    Raises:
        AgentOutsideFrustum: Агент выходит из поля зрения
    """
    check_frustum(scenario)
    rays = camera_rays(scenario)
    frames = [render_frame(scenario, frame, rays) for frame in scenario.frames]
    logger.info(f"Синтетика: кадров {len(frames)}, агентов {len(scenario.agents)}")
    return SynthSequence(scenario=scenario, frames=frames)
