"""
Тесты фьюжна треков: перекрытие 3D-боксов, ветви присоединения
наблюдений, разбиение наблюдений и отчёт о линии безопасности.
"""

import pytest

from src.config import FusionConfig
from src.constants import Sources
from src.fusion import (
    DangerSide,
    Detection3D,
    FusionError,
    OutOfOrderFrame,
    SafetyLine,
    TrackletManager,
    UnsupportedYaw,
    already_in_history,
    fuse_frame,
    fuse_observation,
    fuse_sequence,
    ioe_3d,
    iou_3d,
    safety_report,
)
from src.lifting import BBox3D


def _box(x, y, extent=(0.5, 1.7, 0.5), frame=1, source="a", track=1, confidence=1.0):
    return BBox3D(
        center=(x, y, extent[1] / 2.0),
        extent=extent,
        confidence=confidence,
        source_id=source,
        track_id=track,
        frame_index=frame,
    )


def _det(x, y, tracker, track, frame, extent=(0.5, 1.7, 0.5)):
    return Detection3D.from_box(_box(x, y, extent, frame, tracker, track))


class TestOverlap:
    def test_identical(self):
        box = _box(0.0, 5.0)
        assert iou_3d(box, box) == pytest.approx(1.0)
        assert ioe_3d(box, box) == pytest.approx(1.0)

    def test_disjoint(self):
        assert iou_3d(_box(0.0, 5.0), _box(3.0, 5.0)) == 0.0
        assert ioe_3d(_box(0.0, 5.0), _box(3.0, 5.0)) == 0.0

    def test_enclosed(self):
        big = _box(0.0, 5.0, extent=(1.0, 2.0, 1.0))
        small = BBox3D(center=(0.0, 5.0, 0.5), extent=(0.4, 1.0, 0.4))
        assert ioe_3d(big, small) == pytest.approx(1.0)
        assert iou_3d(big, small) == pytest.approx(small.volume / big.volume)

    def test_half_shifted(self):
        a = BBox3D(center=(0.0, 0.0, 0.5), extent=(1.0, 1.0, 1.0))
        b = BBox3D(center=(0.5, 0.0, 0.5), extent=(1.0, 1.0, 1.0))
        assert iou_3d(a, b) == pytest.approx(0.5 / 1.5)
        assert ioe_3d(a, b) == pytest.approx(0.5)

    def test_yaw_rejected(self):
        rotated = BBox3D(center=(0.0, 0.0, 0.5), extent=(1.0, 1.0, 1.0), yaw=0.3)
        with pytest.raises(UnsupportedYaw):
            iou_3d(rotated, rotated)


class TestBranches:
    def test_new_tracklet(self):
        mgr = TrackletManager()
        assert fuse_observation(mgr, _det(0.0, 5.0, "a", 1, 1)) == 1
        assert fuse_observation(mgr, _det(3.0, 5.0, "a", 2, 1)) == 2

    def test_history_branch_ignores_geometry(self):
        mgr = TrackletManager()
        fuse_observation(mgr, _det(0.0, 5.0, "a", 7, 1))
        far = _det(4.0, 9.0, "a", 7, 2)
        assert already_in_history(mgr, far) == 1
        assert fuse_observation(mgr, far) == 1

    def test_iou_branch(self):
        mgr = TrackletManager()
        fuse_observation(mgr, _det(0.0, 5.0, "a", 1, 1))
        assert fuse_observation(mgr, _det(0.05, 5.0, "b", 4, 1)) == 1
        assert mgr.tracklets[1].members == {("a", 1), ("b", 4)}

    def test_ioe_branch_for_enclosed_box(self):
        mgr = TrackletManager(iou_threshold=0.3, ioe_threshold=0.7)
        fuse_observation(mgr, _det(0.0, 5.0, "a", 1, 1, extent=(1.0, 2.0, 1.0)))
        small = _det(0.0, 5.0, "b", 1, 1, extent=(0.4, 1.0, 0.4))
        assert iou_3d(small.box, mgr.tracklets[1].latest_box) < 0.3
        assert fuse_observation(mgr, small) == 1

    def test_same_tracker_not_merged_within_frame(self):
        mgr = TrackletManager()
        assert fuse_observation(mgr, _det(0.0, 5.0, "a", 1, 1)) == 1
        assert fuse_observation(mgr, _det(0.0, 5.0, "a", 2, 1)) == 2

    def test_out_of_order_frame(self):
        mgr = TrackletManager()
        fuse_observation(mgr, _det(0.0, 5.0, "a", 1, 5))
        with pytest.raises(OutOfOrderFrame):
            fuse_observation(mgr, _det(0.0, 5.0, "a", 1, 3))

    def test_stale_tracklet_retired(self):
        mgr = TrackletManager(staleness_limit=2)
        fuse_frame(mgr, [_det(0.0, 5.0, "a", 1, 1)], 1)
        fuse_frame(mgr, [_det(3.0, 5.0, "b", 1, 4)], 4)
        assert 1 not in mgr.tracklets
        assert [t.fused_id for t in mgr.retired] == [1]
        # Пара (a, 1) после вывода треклета открывает новый
        assert fuse_observation(mgr, _det(0.0, 5.0, "a", 1, 5)) == 3

    def test_thresholds_validated(self):
        with pytest.raises(ValueError):
            TrackletManager(iou_threshold=0.0)
        with pytest.raises(ValueError):
            FusionConfig(ioe_threshold=1.5)

    def test_box_without_track_id(self):
        with pytest.raises(FusionError):
            Detection3D.from_box(BBox3D(center=(0, 0, 0.5), extent=(1, 1, 1)))


class TestFuseFrame:
    def test_confidence_weighted_box(self):
        mgr = TrackletManager()
        detections = [
            Detection3D.from_box(_box(0.0, 5.0, source="a", confidence=1.0)),
            Detection3D.from_box(_box(0.2, 5.0, source="b", confidence=0.25)),
        ]
        (fused,) = fuse_frame(mgr, detections, 1)
        assert fused.source_id == Sources.FUSED
        assert fused.track_id == 1
        assert fused.center[0] == pytest.approx(0.2 * 0.25 / 1.25)
        assert fused.confidence == pytest.approx(1.0)

    def test_wrong_frame_rejected(self):
        with pytest.raises(FusionError):
            fuse_frame(TrackletManager(), [_det(0.0, 5.0, "a", 1, 2)], 1)

    def test_source_order_does_not_matter(self):
        a = [_box(0.0, 5.0, frame=f, source="a", track=1) for f in range(1, 6)]
        b = [_box(0.1, 5.0, frame=f, source="b", track=9) for f in range(1, 6)]
        first = fuse_sequence({"a": a, "b": b})
        second = fuse_sequence({"b": b, "a": a})
        assert first == second
        assert {box.track_id for box in first} == {1}


def test_complementary_dropouts_cover_union():
    a = [_box(0.1 * f, 5.0, frame=f, source="a", track=1) for f in range(1, 11) if f not in (3, 4, 5)]
    b = [_box(0.1 * f + 0.05, 5.0, frame=f, source="b", track=7) for f in range(1, 11) if f not in (6, 7, 8)]
    fused = fuse_sequence({"a": a, "b": b})

    assert {box.track_id for box in fused} == {1}
    union = {box.frame_index for box in a} | {box.frame_index for box in b}
    assert {box.frame_index for box in fused} >= union


def _random_sources(rng, sources: int, objects: int, frames: int):
    result = {}
    positions = rng.uniform([-3.0, 3.0], [3.0, 12.0], size=(objects, 2))
    for s in range(sources):
        boxes = []
        for frame in range(1, frames + 1):
            for obj in range(objects):
                if rng.random() < 0.3:
                    continue
                x, y = positions[obj] + rng.normal(0.0, 0.15, 2)
                boxes.append(_box(float(x), float(y), frame=frame, source=f"s{s}", track=obj + 1))
        result[f"s{s}"] = boxes
    return result


def test_observations_partitioned_across_tracklets(rng):
    for _ in range(50):
        sources = _random_sources(rng, int(rng.integers(2, 5)), int(rng.integers(1, 6)), 10)
        mgr = TrackletManager.from_config(FusionConfig(staleness_limit=3))
        fuse_sequence(sources, manager=mgr)

        seen = [
            (obs.tracker_id, obs.track_id, obs.frame_index)
            for tracklet in mgr.all_tracklets()
            for obs in tracklet.observations
        ]
        expected = [
            (name, box.track_id, box.frame_index)
            for name, boxes in sources.items()
            for box in boxes
        ]
        assert len(seen) == len(set(seen))
        assert sorted(seen) == sorted(expected)


class TestSafety:
    @pytest.fixture
    def line(self):
        return SafetyLine(points=((-6.0, 5.0), (6.0, 5.0)), danger_side=DangerSide.RIGHT)

    def test_intervals_and_distance(self, line):
        tracks = [
            _box(0.0, 3.0, frame=1, track=1),
            _box(0.0, 3.0, frame=2, track=1),
            _box(0.0, 3.5, frame=3, track=1),
            _box(0.0, 8.0, frame=4, track=1),
            _box(0.0, 4.9, frame=5, track=1),
            _box(1.0, 9.0, frame=1, track=2),
        ]
        violations = safety_report(tracks, line)
        assert [(v.fused_id, v.start_frame, v.end_frame) for v in violations] == [(1, 1, 3), (1, 5, 5)]
        assert violations[0].min_distance_m == pytest.approx(1.25)
        assert violations[1].min_distance_m == 0.0

    def test_frame_range(self, line):
        tracks = [_box(0.0, 3.0, frame=f, track=1) for f in range(1, 6)]
        violations = safety_report(tracks, line, frame_range=(2, 3))
        assert [(v.start_frame, v.end_frame) for v in violations] == [(2, 3)]

    def test_left_side(self):
        line = SafetyLine(points=((-6.0, 5.0), (6.0, 5.0)), danger_side=DangerSide.LEFT)
        assert safety_report([_box(0.0, 3.0)], line) == []
        assert len(safety_report([_box(0.0, 8.0)], line)) == 1

    def test_line_needs_two_points(self):
        with pytest.raises(ValueError):
            SafetyLine(points=((0.0, 0.0),))
