"""
Тесты автокалибровки плоскости: RANSAC, проверка априорными знаниями,
маска проходимой поверхности.
"""

import math
import time

import numpy as np
import pytest

from src.calibration import (
    DegenerateInput,
    NoConsensus,
    PlaneFitConfig,
    PlaneRejected,
    RejectReason,
    WalkableMask,
    accumulate_walkable,
    calibrate_ground_plane,
    fit_ground_plane,
    ransac_plane_fit,
    validate_plane,
    walkable_points,
)
from src.geometry import CameraIntrinsics, from_ground_frame, plane_from_pose
from src.lifting import BBox2D, DepthMap


def _noisy_platform(seed: int, count: int = 1000, outlier_fraction: float = 0.3):
    """Точки платформы (шум 5 мм) и выбросы над ней, в системе камеры."""
    rng = np.random.default_rng(seed)
    plane = plane_from_pose(float(rng.uniform(2.5, 4.0)), float(rng.uniform(0.2, 0.6)))

    outliers = int(count * outlier_fraction)
    inliers = count - outliers
    ground = np.column_stack([
        rng.uniform(-4.0, 4.0, inliers),
        rng.uniform(2.0, 15.0, inliers),
        rng.normal(0.0, 0.005, inliers),
    ])
    clutter = np.column_stack([
        rng.uniform(-4.0, 4.0, outliers),
        rng.uniform(2.0, 15.0, outliers),
        rng.uniform(0.3, 2.5, outliers),
    ])
    points = from_ground_frame(plane, np.vstack([ground, clutter]))
    return plane, points[rng.permutation(count)]


def _angle_deg(a: np.ndarray, b: np.ndarray) -> float:
    return math.degrees(math.acos(min(1.0, abs(float(a @ b)))))


def test_ransac_recovers_plane_on_twenty_seeds():
    started = time.perf_counter()
    for seed in range(20):
        truth, points = _noisy_platform(seed)
        fit = fit_ground_plane(points, PlaneFitConfig(rng_seed=seed))
        assert _angle_deg(fit.plane.normal, truth.normal) < 1.0, f"seed {seed}"
        assert abs(fit.plane.offset - truth.offset) < 0.01, f"seed {seed}"
        assert fit.plane.camera_height > 0
    assert time.perf_counter() - started < 10.0


def test_inlier_mask_in_input_order():
    truth, points = _noisy_platform(3)
    fit = fit_ground_plane(points, PlaneFitConfig())
    heights = np.abs(truth.signed_distance(points))
    assert fit.inlier_mask.shape == (len(points),)
    assert np.all(heights[fit.inlier_mask] < 0.05)
    assert fit.inlier_fraction == pytest.approx(0.7, abs=0.02)


def test_result_independent_of_point_order():
    _, points = _noisy_platform(7)
    cfg = PlaneFitConfig(rng_seed=1)
    first = ransac_plane_fit(points, cfg)
    second = ransac_plane_fit(points[::-1].copy(), cfg)
    assert np.allclose(first.normal, second.normal)
    assert first.offset == pytest.approx(second.offset)


def test_degenerate_input():
    cfg = PlaneFitConfig()
    with pytest.raises(DegenerateInput):
        fit_ground_plane(np.zeros((2, 3)), cfg)
    line = np.column_stack([np.linspace(0, 1, 50), np.linspace(0, 2, 50), np.linspace(1, 3, 50)])
    with pytest.raises(DegenerateInput):
        fit_ground_plane(line, cfg)


def test_no_consensus(rng):
    cloud = rng.uniform(-5, 5, size=(500, 3))
    with pytest.raises(NoConsensus):
        fit_ground_plane(cloud, PlaneFitConfig(min_inlier_fraction=0.9, ransac_iterations=100))


def test_validation_rejects_mount_height():
    plane = plane_from_pose(8.0, 0.3)
    validation = validate_plane(plane, PlaneFitConfig())
    assert not validation.accepted
    assert validation.reason == RejectReason.MOUNT_HEIGHT
    assert validation.camera_height == pytest.approx(8.0)


def test_validation_rejects_platform_width():
    plane = plane_from_pose(3.0, 0.3)
    wide = from_ground_frame(plane, np.array([[0.0, 2.0, 0.0], [0.0, 20.0, 0.0], [1.0, 5.0, 0.0]]))
    validation = validate_plane(plane, PlaneFitConfig(), inlier_points=wide)
    assert validation.reason == RejectReason.PLATFORM_WIDTH
    assert validation.platform_width == pytest.approx(18.0)


def test_validation_rejects_far_platform():
    plane = plane_from_pose(3.0, 0.3)
    far = from_ground_frame(plane, np.array([[0.0, 6.0, 0.0], [0.0, 9.0, 0.0], [1.0, 7.0, 0.0]]))
    validation = validate_plane(plane, PlaneFitConfig(prior_train_clearance=2.0), inlier_points=far)
    assert validation.reason == RejectReason.TRAIN_PROXIMITY


def test_validation_accepts():
    plane = plane_from_pose(3.0, 0.3)
    points = from_ground_frame(plane, np.array([[0.0, 1.0, 0.0], [0.0, 6.0, 0.0], [1.0, 3.0, 0.0]]))
    validation = validate_plane(plane, PlaneFitConfig(), inlier_points=points)
    assert validation.accepted
    assert validation.reason == RejectReason.NONE
    assert validation.platform_width == pytest.approx(5.0)


class TestWalkableMask:
    def test_foot_strip_accumulates(self):
        mask = WalkableMask.empty((40, 40), threshold=3)
        box = BBox2D(left=10, top=10, w_bb=5, h_bb=20)
        for _ in range(2):
            accumulate_walkable(mask, [box])
        assert not mask.mask.any()

        accumulate_walkable(mask, [box])
        rows, cols = np.nonzero(mask.mask)
        assert set(rows.tolist()) == {28, 29}
        assert set(cols.tolist()) == set(range(10, 15))
        assert mask.frame_count == 3

    def test_empty_frame_leaves_counts(self):
        mask = WalkableMask.empty((40, 40), threshold=1)
        accumulate_walkable(mask, [BBox2D(left=10, top=10, w_bb=5, h_bb=20)])
        before = mask.counts.copy()

        accumulate_walkable(mask, [])
        assert np.array_equal(mask.counts, before)
        assert np.array_equal(mask.mask, before >= 1)
        assert mask.frame_count == 2

    def test_points_inside_mask_only(self):
        intrinsics = CameraIntrinsics(fx=100.0, fy=100.0, cx=20.0, cy=20.0, width=40, height=40)
        depth = DepthMap.from_array(np.full((40, 40), 4.0))
        mask = WalkableMask.empty((40, 40), threshold=1)
        accumulate_walkable(mask, [BBox2D(left=0, top=0, w_bb=10, h_bb=10)])

        masked = walkable_points(mask, depth, intrinsics)
        everything = walkable_points(mask, depth, intrinsics, use_mask=False)
        assert len(masked) == 10
        assert len(everything) == 1600
        assert len(walkable_points(mask, depth, intrinsics, use_mask=False, stride=4)) == 100


def test_calibrate_on_rendered_platform(default_sequence):
    scenario = default_sequence.scenario
    # Без маски в облако попадают точки у горизонта, поэтому ширина не ограничивается
    cfg = PlaneFitConfig(use_walkable_mask=False, point_stride=4, rng_seed=0, prior_max_platform_width=1e4)
    depth_maps = default_sequence.depth_maps[:3]
    result = calibrate_ground_plane(depth_maps, [[] for _ in depth_maps], scenario.intrinsics, cfg)

    assert result.validation.accepted
    assert result.plane.camera_height == pytest.approx(scenario.camera_height, abs=0.01)
    assert _angle_deg(result.plane.normal, scenario.plane.normal) < 1.0
    assert result.point_count > 0


def test_calibrate_rejects_implausible_mount(default_sequence):
    scenario = default_sequence.scenario
    cfg = PlaneFitConfig(use_walkable_mask=False, prior_mount_height_range=(4.0, 6.0))
    with pytest.raises(PlaneRejected) as info:
        calibrate_ground_plane(default_sequence.depth_maps[:1], [[]], scenario.intrinsics, cfg)
    assert info.value.validation.reason == RejectReason.MOUNT_HEIGHT
