"""
Тесты модели камеры и системы координат плоскости.
"""

import math

import numpy as np
import pytest

from src.geometry import (
    CameraIntrinsics,
    GeometryError,
    GroundPlane,
    InvalidCameraModel,
    NonPositiveDepth,
    NonPositiveDisparity,
    StereoRig,
    backproject,
    disparity_map_to_depth,
    disparity_to_depth,
    from_ground_frame,
    plane_from_pose,
    project,
    to_ground_frame,
)


@pytest.fixture
def intrinsics():
    return CameraIntrinsics(fx=1000.0, fy=1000.0, cx=640.0, cy=480.0, width=1280, height=960)


def test_disparity_to_depth(intrinsics):
    rig = StereoRig(intrinsics=intrinsics, baseline=0.1)
    assert disparity_to_depth(rig, 50.0) == pytest.approx(2.0)
    with pytest.raises(NonPositiveDisparity):
        disparity_to_depth(rig, 0.0)


def test_disparity_map_marks_non_positive_invalid(intrinsics):
    rig = StereoRig(intrinsics=intrinsics, baseline=0.1)
    disparity = np.array([[50.0, 0.0], [-1.0, np.nan]])
    depth = disparity_map_to_depth(rig, disparity)
    assert depth.valid.tolist() == [[True, False], [False, False]]
    assert depth.depth[0, 0] == pytest.approx(2.0)


def test_invalid_camera_model():
    with pytest.raises(InvalidCameraModel):
        CameraIntrinsics(fx=0.0, fy=1.0, cx=1.0, cy=1.0, width=4, height=4)
    with pytest.raises(InvalidCameraModel):
        CameraIntrinsics(fx=1.0, fy=1.0, cx=10.0, cy=1.0, width=4, height=4)
    with pytest.raises(InvalidCameraModel):
        StereoRig(intrinsics=CameraIntrinsics(1.0, 1.0, 1.0, 1.0, 4, 4), baseline=0.0)


def test_backproject_then_project(intrinsics, rng):
    for _ in range(50):
        u, v = rng.uniform(0, 1280), rng.uniform(0, 960)
        depth = rng.uniform(0.5, 30.0)
        point = backproject(intrinsics, u, v, depth)
        assert point[2] == pytest.approx(depth)
        pu, pv = project(intrinsics, point)
        assert pu == pytest.approx(u)
        assert pv == pytest.approx(v)


def test_backproject_rejects_non_positive_depth(intrinsics):
    with pytest.raises(NonPositiveDepth):
        backproject(intrinsics, 10, 10, 0.0)
    with pytest.raises(NonPositiveDepth):
        project(intrinsics, np.array([0.0, 0.0, -1.0]))


def test_plane_orientation_puts_camera_above():
    plane = GroundPlane.from_normal_offset([0.0, 2.0, 0.0], 4.0)
    assert plane.camera_height == pytest.approx(2.0)
    assert np.allclose(plane.normal, [0.0, -1.0, 0.0])
    assert plane.signed_distance(np.zeros(3)) == pytest.approx(2.0)


def test_plane_from_pose_frame():
    plane = plane_from_pose(3.0, 0.35)
    assert plane.camera_height == pytest.approx(3.0)

    rotation = plane.rotation
    assert np.allclose(rotation @ rotation.T, np.eye(3))
    assert np.linalg.det(rotation) == pytest.approx(1.0)

    camera = to_ground_frame(plane, np.zeros(3))
    assert np.allclose(camera, [0.0, 0.0, 3.0])

    # Оптическая ось смотрит вперёд (y) и вниз
    ahead = to_ground_frame(plane, np.array([0.0, 0.0, 5.0])) - camera
    assert ahead[1] > 0
    assert ahead[2] == pytest.approx(-5.0 * math.sin(0.35))


def test_ground_frame_round_trip(rng):
    plane = plane_from_pose(2.5, 0.4)
    points = rng.uniform(-10, 10, size=(100, 3))
    back = from_ground_frame(plane, to_ground_frame(plane, points))
    assert np.allclose(back, points)

    # Точки на плоскости имеют нулевую высоту
    on_plane = from_ground_frame(plane, np.column_stack([points[:, :2], np.zeros(100)]))
    assert np.allclose(plane.signed_distance(on_plane), 0.0)


def test_to_plane_matrix_matches_transform(rng):
    plane = plane_from_pose(3.0, 0.3)
    point = rng.uniform(-5, 5, size=3)
    transformed = plane.to_plane @ np.append(point, 1.0)
    assert np.allclose(transformed, to_ground_frame(plane, point))


def test_zero_normal_rejected():
    with pytest.raises(GeometryError):
        GroundPlane.from_normal_offset([0.0, 0.0, 0.0], 1.0)
    with pytest.raises(GeometryError):
        plane_from_pose(-1.0, 0.3)
