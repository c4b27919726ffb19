"""
Тесты оценки глубины в боксе и подъёма 2D-боксов в 3D.
"""

import math
import time

import numpy as np
import pytest

from src.geometry import CameraIntrinsics, NonPositiveDepth, plane_from_pose
from src.lifting import (
    BBox2D,
    BBox3D,
    DepthMap,
    NoValidDepth,
    OutOfBoxCoordinate,
    estimate_box_depth,
    gaussian_weight,
    lift_bbox,
    lift_detections,
    project_bbox3d,
)


def _oracle_depth(depth: np.ndarray, valid: np.ndarray, u0: int, v0: int, w: int, h: int) -> float:
    """Прямое суммирование по пикселям бокса."""
    weighted = 0.0
    weight_sum = 0.0
    for v in range(h):
        for u in range(w):
            if not valid[v0 + v, u0 + u]:
                continue
            norm = 1.0 / (2.0 * math.pi * math.sqrt(w * h))
            weight = norm * math.exp(-((u - w / 2) ** 2 / (2 * w ** 2) + (v - h / 2) ** 2 / (2 * h ** 2)))
            weighted += weight * depth[v0 + v, u0 + u]
            weight_sum += weight
    return weighted / weight_sum


class TestGaussianWeight:
    def test_center_value(self):
        assert gaussian_weight(50, 25, 100, 50) == pytest.approx(1.0 / (2 * math.pi * math.sqrt(5000)))

    def test_edge_value(self):
        center = gaussian_weight(50, 50, 100, 100)
        assert gaussian_weight(0, 50, 100, 100) == pytest.approx(center * math.exp(-1.0 / 8.0))

    def test_corner_below_center(self):
        for w, h in ((3, 3), (10, 40), (101, 7)):
            assert gaussian_weight(0, 0, w, h) < gaussian_weight(w / 2, h / 2, w, h)

    def test_out_of_box(self):
        with pytest.raises(OutOfBoxCoordinate):
            gaussian_weight(10, 0, 10, 10)
        with pytest.raises(OutOfBoxCoordinate):
            gaussian_weight(0, -1, 10, 10)


class TestEstimateBoxDepth:
    def test_constant_depth(self):
        depth = DepthMap.from_array(np.full((40, 60), 5.0))
        estimate = estimate_box_depth(depth, BBox2D(left=10, top=5, w_bb=20, h_bb=30))
        assert estimate.depth == pytest.approx(5.0, abs=1e-6)
        assert estimate.weight_sum > 0

    def test_all_invalid(self):
        depth = DepthMap.from_array(np.zeros((20, 20)))
        with pytest.raises(NoValidDepth):
            estimate_box_depth(depth, BBox2D(left=2, top=2, w_bb=5, h_bb=5))

    def test_three_by_three(self):
        values = np.array([[2.0, 2.0, 2.0], [4.0, 4.0, 4.0], [6.0, 6.0, 6.0]])
        depth = DepthMap.from_array(values)
        estimate = estimate_box_depth(depth, BBox2D(left=0, top=0, w_bb=3, h_bb=3))
        expected = _oracle_depth(values, np.ones((3, 3), dtype=bool), 0, 0, 3, 3)
        assert estimate.depth == pytest.approx(expected, rel=1e-12)
        # Центр ядра в (1.5, 1.5): нижние строки весят больше
        assert estimate.depth > 4.0

    def test_matches_double_loop_oracle(self, rng):
        started = time.perf_counter()
        for _ in range(200):
            height, width = rng.integers(10, 40, size=2)
            values = rng.uniform(0.5, 20.0, size=(height, width))
            valid = rng.random((height, width)) > 0.3
            depth = DepthMap(depth=np.where(valid, values, 0.0), valid=valid)

            w = int(rng.integers(1, width + 1))
            h = int(rng.integers(1, height + 1))
            u0 = int(rng.integers(0, width - w + 1))
            v0 = int(rng.integers(0, height - h + 1))
            box = BBox2D(left=u0, top=v0, w_bb=w, h_bb=h)

            if not valid[v0:v0 + h, u0:u0 + w].any():
                with pytest.raises(NoValidDepth):
                    estimate_box_depth(depth, box)
                continue
            expected = _oracle_depth(values, valid, u0, v0, w, h)
            assert estimate_box_depth(depth, box).depth == pytest.approx(expected, rel=1e-9)
        assert time.perf_counter() - started < 5.0

    def test_convex_combination(self, rng):
        values = rng.uniform(1.0, 9.0, size=(30, 30))
        depth = DepthMap.from_array(values)
        box = BBox2D(left=3, top=4, w_bb=17, h_bb=21)
        estimate = estimate_box_depth(depth, box).depth
        inside = values[4:25, 3:20]
        assert inside.min() <= estimate <= inside.max()

    def test_invalid_pixel_values_ignored(self, rng):
        values = rng.uniform(1.0, 9.0, size=(30, 30))
        valid = rng.random((30, 30)) > 0.5
        box = BBox2D(left=0, top=0, w_bb=30, h_bb=30)
        first = estimate_box_depth(DepthMap(np.where(valid, values, 0.0), valid), box).depth
        second = estimate_box_depth(DepthMap(np.where(valid, values, 123.0), valid), box).depth
        assert first == pytest.approx(second, rel=1e-12)

    def test_box_clamped_to_image(self):
        depth = DepthMap.from_array(np.full((20, 20), 3.0))
        box = BBox2D(left=15, top=15, w_bb=30, h_bb=30)
        assert estimate_box_depth(depth, box).depth == pytest.approx(3.0)


class TestLift:
    @pytest.fixture
    def intrinsics(self):
        return CameraIntrinsics(fx=1000.0, fy=1000.0, cx=640.0, cy=480.0, width=1280, height=960)

    def test_pinhole_extent(self, intrinsics):
        plane = plane_from_pose(3.0, 0.3)
        box = BBox2D(left=640 - 125, top=480 - 250, w_bb=250, h_bb=500)
        lifted = lift_bbox(box, 4.0, intrinsics, plane)
        assert lifted.extent == pytest.approx((1.0, 2.0, 1.0))
        assert lifted.yaw == 0.0

    def test_non_positive_depth(self, intrinsics):
        box = BBox2D(left=0, top=0, w_bb=10, h_bb=10)
        with pytest.raises(NonPositiveDepth):
            lift_bbox(box, 0.0, intrinsics, plane_from_pose(3.0, 0.3))

    def test_person_center_height(self):
        # Камера без наклона на высоте 1.5 м, человек 0.5 x 1.7 м в 5 м
        intrinsics = CameraIntrinsics(fx=500.0, fy=500.0, cx=320.0, cy=240.0, width=640, height=480)
        plane = plane_from_pose(1.5, 0.0)
        top = 240.0 + 500.0 * (1.5 - 1.7) / 5.0
        bottom = 240.0 + 500.0 * 1.5 / 5.0
        box = BBox2D(left=295.0, top=top, w_bb=50.0, h_bb=bottom - top)

        lifted = lift_bbox(box, 5.0, intrinsics, plane)
        assert lifted.height == pytest.approx(1.7)
        assert lifted.center[2] == pytest.approx(lifted.height / 2.0, abs=0.05)
        # Центр отодвинут от камеры на половину глубины
        assert lifted.center[1] == pytest.approx(5.25, abs=0.01)

    def test_depth_equals_width_for_every_lifted_box(self, default_sequence):
        scenario = default_sequence.scenario
        lifted_count = 0
        for frame in default_sequence.frames:
            boxes = [a.to_bbox("det") for a in frame.annotations]
            for lifted in lift_detections(boxes, frame.depth, scenario.intrinsics, scenario.plane):
                assert lifted.depth == lifted.width
                lifted_count += 1
        assert lifted_count > 0

    def test_lift_skips_boxes_without_depth(self, intrinsics):
        values = np.full((960, 1280), 4.0)
        values[:100, :100] = 0.0
        depth = DepthMap.from_array(values)
        boxes = [
            BBox2D(left=10, top=10, w_bb=50, h_bb=50, track_id=1),
            BBox2D(left=600, top=400, w_bb=80, h_bb=160, track_id=2),
        ]
        lifted = lift_detections(boxes, depth, intrinsics, plane_from_pose(3.0, 0.3))
        assert [b.track_id for b in lifted] == [2]

    def test_projection_encloses_lifted_center(self, intrinsics):
        plane = plane_from_pose(3.0, 0.3)
        box = BBox3D(center=(0.5, 6.0, 0.85), extent=(0.5, 1.7, 0.5))
        left, top, width, height = project_bbox3d(box, intrinsics, plane)
        assert width >= 1 and height >= 1
        assert 0 <= left and left + width <= intrinsics.width
        assert 0 <= top and top + height <= intrinsics.height


def test_bbox_validation():
    with pytest.raises(ValueError):
        BBox2D(left=0, top=0, w_bb=0.5, h_bb=10)
    with pytest.raises(ValueError):
        BBox2D(left=0, top=0, w_bb=5, h_bb=5, confidence=1.5)
    with pytest.raises(ValueError):
        BBox3D(center=(0, 0, 0), extent=(1.0, 0.0, 1.0))

    clamped = BBox2D(left=-5, top=-5, w_bb=20, h_bb=20).clamp(10, 10)
    assert (clamped.left, clamped.top, clamped.w_bb, clamped.h_bb) == (0.0, 0.0, 10.0, 10.0)
