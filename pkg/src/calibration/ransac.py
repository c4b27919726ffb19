"""
RANSAC-оценка плоскости платформы по 3D-точкам и проверка
найденной плоскости априорными знаниями о монтаже камеры.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from ..config import PlaneFitConfig
from ..constants import Tolerances
from ..geometry import CameraIntrinsics, GroundPlane, to_ground_frame
from ..lifting import BBox2D, DepthMap
from .walkable import WalkableMask, accumulate_walkable, walkable_points


logger = logging.getLogger(__name__)

# Кандидатов за один векторный проход
_BATCH = 64


class CalibrationError(Exception):
    """Базовое исключение для калибровки плоскости."""
    pass


class DegenerateInput(CalibrationError):
    """Меньше трёх точек или все точки коллинеарны."""
    pass


class NoConsensus(CalibrationError):
    """Доля инлаеров ниже min_inlier_fraction."""
    pass


class PlaneRejected(CalibrationError):
    """Плоскость не прошла проверку априорными знаниями."""

    def __init__(self, validation: "PlaneValidation"):
        super().__init__(f"Плоскость отклонена: {validation.reason.value} ({validation.detail})")
        self.validation = validation


class RejectReason(Enum):
    """
    Причина отклонения плоскости.

    Values:
        NONE: Плоскость принята
        MOUNT_HEIGHT: Высота камеры вне априорного диапазона
        PLATFORM_WIDTH: Ширина платформы больше априорного максимума
        TRAIN_PROXIMITY: Платформа слишком далеко от поезда
    """
    NONE = "none"
    MOUNT_HEIGHT = "mount_height"
    PLATFORM_WIDTH = "platform_width"
    TRAIN_PROXIMITY = "train_proximity"


@dataclass(frozen=True, eq=False)
class PlaneFitResult:
    """Результат RANSAC: плоскость, маска инлаеров (в исходном порядке точек)."""
    plane: GroundPlane
    inlier_mask: np.ndarray
    inlier_count: int

    @property
    def inlier_fraction(self) -> float:
        return self.inlier_count / max(1, len(self.inlier_mask))


@dataclass(frozen=True)
class PlaneValidation:
    """Решение проверки плоскости."""
    accepted: bool
    reason: RejectReason
    camera_height: float
    platform_width: Optional[float] = None
    detail: str = ""


@dataclass(frozen=True, eq=False)
class CalibrationResult:
    """Результат фазы калибровки."""
    fit: PlaneFitResult
    validation: PlaneValidation
    mask: WalkableMask
    point_count: int

    @property
    def plane(self) -> GroundPlane:
        return self.fit.plane


def _check_points(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3:
        raise DegenerateInput(f"Ожидался массив (N, 3), получено {points.shape}")
    points = points[np.all(np.isfinite(points), axis=1)]
    if len(points) < 3:
        raise DegenerateInput(f"Недостаточно точек для плоскости: {len(points)}")

    singular = np.linalg.svd(points - points.mean(axis=0), compute_uv=False)
    if singular[1] <= Tolerances.DEGENERATE_SINGULAR * max(1.0, singular[0]):
        raise DegenerateInput("Точки коллинеарны")
    return points


def _least_squares_plane(points: np.ndarray):
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    normal = vt[-1]
    return normal, float(normal @ centroid)


def fit_ground_plane(points: np.ndarray, cfg: PlaneFitConfig) -> PlaneFitResult:
    """
    RANSAC по тройкам точек с финальным МНК-уточнением по инлаерам.

    Точки сортируются канонически перед сэмплированием, поэтому результат
    не зависит от порядка входа при фиксированном rng_seed.

    Raises:
        DegenerateInput: Меньше трёх точек или коллинеарность
        NoConsensus: Доля инлаеров ниже cfg.min_inlier_fraction
    """
    raw = np.asarray(points, dtype=np.float64)
    finite = np.all(np.isfinite(raw), axis=1) if raw.ndim == 2 else None
    pts = _check_points(raw)

    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))
    pts = pts[order]
    n = len(pts)

    rng = np.random.default_rng(cfg.rng_seed)
    samples = np.stack([
        rng.choice(n, size=3, replace=False) for _ in range(cfg.ransac_iterations)
    ])

    best_count = -1
    best_normal: Optional[np.ndarray] = None
    best_offset = 0.0

    for start in range(0, cfg.ransac_iterations, _BATCH):
        batch = samples[start:start + _BATCH]
        p0, p1, p2 = pts[batch[:, 0]], pts[batch[:, 1]], pts[batch[:, 2]]
        normals = np.cross(p1 - p0, p2 - p0)
        norms = np.linalg.norm(normals, axis=1)
        usable = norms > 1e-12
        if not np.any(usable):
            continue
        normals = normals[usable] / norms[usable, None]
        offsets = np.einsum("ij,ij->i", normals, p0[usable])

        distances = np.abs(pts @ normals.T - offsets[None, :])
        counts = (distances <= cfg.inlier_threshold).sum(axis=0)
        winner = int(np.argmax(counts))
        if counts[winner] > best_count:
            best_count = int(counts[winner])
            best_normal = normals[winner]
            best_offset = float(offsets[winner])

    if best_normal is None:
        raise DegenerateInput("Все выборки RANSAC вырождены")

    inliers = np.abs(pts @ best_normal - best_offset) <= cfg.inlier_threshold
    fraction = inliers.sum() / n
    logger.debug(f"RANSAC: лучший консенсус {best_count}/{n} ({fraction:.2%})")
    if fraction < cfg.min_inlier_fraction:
        raise NoConsensus(
            f"Доля инлаеров {fraction:.3f} ниже порога {cfg.min_inlier_fraction}"
        )

    normal, offset = _least_squares_plane(pts[inliers])
    plane = GroundPlane.from_normal_offset(normal, offset)

    # Маска инлаеров в порядке входных точек
    sorted_mask = np.zeros(n, dtype=bool)
    sorted_mask[order[inliers]] = True
    if finite is not None and not np.all(finite):
        full_mask = np.zeros(len(raw), dtype=bool)
        full_mask[np.flatnonzero(finite)] = sorted_mask
        sorted_mask = full_mask

    logger.info(
        f"Плоскость найдена: n={np.round(plane.normal, 4).tolist()}, "
        f"высота камеры {plane.camera_height:.3f} м, инлаеров {int(inliers.sum())}"
    )
    return PlaneFitResult(plane=plane, inlier_mask=sorted_mask, inlier_count=int(inliers.sum()))


def ransac_plane_fit(points: np.ndarray, cfg: PlaneFitConfig) -> GroundPlane:
    """RANSAC-оценка плоскости (только плоскость, см. fit_ground_plane)."""
    return fit_ground_plane(points, cfg).plane


def validate_plane(
    plane: GroundPlane,
    cfg: PlaneFitConfig,
    inlier_points: Optional[np.ndarray] = None,
    camera_position: Sequence[float] = (0.0, 0.0, 0.0),
) -> PlaneValidation:
    """
    Проверяет плоскость априорными знаниями.

    Args:
        plane: Плоскость из RANSAC
        cfg: Конфигурация с априорными диапазонами
        inlier_points: Инлаеры в системе камеры - для ширины платформы
            (размах по оси y плоскости, поперёк поезда)
        camera_position: Позиция камеры в системе камеры

    Returns:
        PlaneValidation: Решение с причиной отклонения
    """
    height = float(plane.signed_distance(np.asarray(camera_position, dtype=np.float64)))
    low, high = cfg.prior_mount_height_range
    if not low <= height <= high:
        return PlaneValidation(
            accepted=False,
            reason=RejectReason.MOUNT_HEIGHT,
            camera_height=height,
            detail=f"высота {height:.3f} м вне [{low}, {high}]",
        )

    width: Optional[float] = None
    if inlier_points is not None and len(inlier_points) > 0:
        across = to_ground_frame(plane, np.asarray(inlier_points, dtype=np.float64))[:, 1]
        width = float(across.max() - across.min())
        if width > cfg.prior_max_platform_width:
            return PlaneValidation(
                accepted=False,
                reason=RejectReason.PLATFORM_WIDTH,
                camera_height=height,
                platform_width=width,
                detail=f"ширина {width:.2f} м > {cfg.prior_max_platform_width}",
            )

        if cfg.prior_train_clearance is not None:
            foot = to_ground_frame(plane, np.asarray(camera_position, dtype=np.float64))[1]
            nearest = float(across.min() - foot)
            if nearest > cfg.prior_train_clearance:
                return PlaneValidation(
                    accepted=False,
                    reason=RejectReason.TRAIN_PROXIMITY,
                    camera_height=height,
                    platform_width=width,
                    detail=f"ближайшая точка платформы {nearest:.2f} м > {cfg.prior_train_clearance}",
                )

    return PlaneValidation(accepted=True, reason=RejectReason.NONE, camera_height=height,
                           platform_width=width)


def calibrate_ground_plane(
    depth_maps: Sequence[DepthMap],
    detections: Sequence[Sequence[BBox2D]],
    intrinsics: CameraIntrinsics,
    cfg: PlaneFitConfig,
) -> CalibrationResult:
    """
    Полная фаза калибровки: маска -> точки -> RANSAC -> проверка.

    Args:
        depth_maps: Карты глубины кадров калибровки
        detections: Детекции пешеходов по тем же кадрам

    Raises:
        PlaneRejected: Плоскость не прошла проверку
        DegenerateInput, NoConsensus: Ошибки RANSAC
    """
    if len(depth_maps) != len(detections):
        raise CalibrationError(
            f"Число карт глубины ({len(depth_maps)}) не совпадает с числом кадров детекций ({len(detections)})"
        )

    mask = WalkableMask.empty(intrinsics.shape, cfg.walkable_threshold, cfg.foot_strip_fraction)
    for frame_detections in detections:
        accumulate_walkable(mask, frame_detections)

    chunks: List[np.ndarray] = [
        walkable_points(mask, depth, intrinsics, use_mask=cfg.use_walkable_mask, stride=cfg.point_stride)
        for depth in depth_maps
    ]
    points = np.concatenate(chunks) if chunks else np.zeros((0, 3))
    logger.info(f"Калибровка: кадров {len(depth_maps)}, точек {len(points)}, "
                f"проходимых пикселей {int(mask.mask.sum())}")

    fit = fit_ground_plane(points, cfg)
    validation = validate_plane(fit.plane, cfg, inlier_points=points[fit.inlier_mask])
    if not validation.accepted:
        logger.warning(f"Плоскость отклонена: {validation.detail}")
        raise PlaneRejected(validation)

    return CalibrationResult(fit=fit, validation=validation, mask=mask, point_count=len(points))
