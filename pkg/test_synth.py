"""
Тесты синтетических данных: деградация эталона, рендер глубины и
разметки, сценарии и запись на диск.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from src.constants import Formats
from src.geometry import backproject_pixels, to_ground_frame
from src.synth import (
    Agent,
    AgentOutsideFrustum,
    DegraderConfig,
    SynthError,
    complementary_presets,
    default_scenario,
    degrade,
    degrade_detections,
    dump_scenario,
    load_scenario,
    render_scenario,
    scenario_from_dict,
    scenario_to_dict,
    write_bundle,
)


class TestDegrader:
    def test_zero_config_is_identity(self, default_sequence):
        gt = default_sequence.gt_tracks
        degraded = degrade(gt, DegraderConfig(source_id="gt"))
        assert degraded == [replace(box, source_id="gt") for box in gt]

    def test_full_miss_is_empty(self, default_sequence):
        assert degrade(default_sequence.gt_tracks, DegraderConfig(miss_probability=1.0)) == []

    def test_miss_rate(self, default_sequence):
        gt = default_sequence.gt_tracks
        repeats = 10000 // len(gt) + 1
        kept = total = 0
        for seed in range(repeats):
            kept += len(degrade(gt, DegraderConfig(miss_probability=0.3, seed=seed)))
            total += len(gt)
        assert 1.0 - kept / total == pytest.approx(0.3, abs=0.02)

    def test_deterministic(self, default_sequence):
        cfg = DegraderConfig(miss_probability=0.2, fp_rate=0.5, noise_m=0.1, id_switch_probability=0.1, seed=9)
        gt = default_sequence.gt_tracks
        assert degrade(gt, cfg) == degrade(gt, cfg)
        assert degrade(gt, cfg) != degrade(gt, replace(cfg, seed=10))

    def test_id_switches_use_fresh_ids(self, default_sequence):
        gt = default_sequence.gt_tracks
        gt_ids = {box.track_id for box in gt}
        degraded = degrade(gt, DegraderConfig(id_switch_probability=0.5, seed=2))
        ids = {box.track_id for box in degraded}
        assert ids - gt_ids
        assert min(ids - gt_ids) > max(gt_ids)
        assert len(degraded) == len(gt)

    def test_false_positives_inside_area(self, default_sequence):
        area = (4.0, 4.0, 6.0, 14.0)
        gt = default_sequence.gt_tracks
        degraded = degrade(gt, DegraderConfig(fp_rate=2.0, seed=4), area=area)
        gt_ids = {box.track_id for box in gt}
        false = [box for box in degraded if box.track_id not in gt_ids]
        assert false
        for box in false:
            assert area[0] <= box.center[0] <= area[2]
            assert area[1] <= box.center[1] <= area[3]

    def test_complementary_dropouts(self, default_sequence):
        presets = complementary_presets(4, block=3, miss_probability=0.0, fp_rate=0.0, high_fp_rate=0.0)
        assert [p.source_id for p in presets] == ["src1", "src2", "src3", "src4"]
        for frame in range(1, 41):
            assert sum(p.dropped(frame) for p in presets) == 1

        gt_frames = {box.frame_index for box in default_sequence.gt_tracks}
        for preset in presets:
            frames = {box.frame_index for box in degrade(default_sequence.gt_tracks, preset)}
            assert frames == {f for f in gt_frames if not preset.dropped(f)}

    def test_high_fp_source(self):
        presets = complementary_presets(3, high_fp_source=1, fp_rate=0.1, high_fp_rate=2.0)
        assert [p.fp_rate for p in presets] == [0.1, 2.0, 0.1]
        assert complementary_presets(1)[0].dropout_period == 0

    def test_detections_stay_in_image(self, default_sequence):
        cfg = DegraderConfig(noise_px=20.0, fp_rate=1.0, seed=1)
        frames = list(default_sequence.scenario.frames)
        records = degrade_detections(default_sequence.annotations, cfg, (320, 240), frames)
        assert records
        for record in records:
            assert 0 <= record.bb_left and record.bb_left + record.bb_width <= 320 + 1e-9
            assert 0 <= record.bb_top and record.bb_top + record.bb_height <= 240 + 1e-9

    def test_config_validated(self):
        with pytest.raises(ValueError):
            DegraderConfig(miss_probability=1.5)
        with pytest.raises(ValueError):
            DegraderConfig(fp_rate=-1.0)
        with pytest.raises(ValueError):
            DegraderConfig(dropout_period=3, dropout_length=4)


class TestRenderer:
    def test_ground_depth_on_optical_axis(self):
        empty = replace(default_scenario(seed=0, frame_count=1), agents=())
        depth = render_scenario(empty).frames[0].depth
        assert depth.valid[120, 160]
        assert depth.depth[120, 160] == pytest.approx(3.0 / math.sin(0.35), rel=1e-9)
        # Выше горизонта луч не встречает плоскость
        assert not depth.valid[0].any()

    def test_silhouette_within_annotation(self, default_sequence):
        scenario = default_sequence.scenario
        background = render_scenario(replace(scenario, agents=(), frame_count=1)).frames[0].depth.depth

        frame = default_sequence.frames[-1]
        changed = np.abs(frame.depth.depth - background) > 1e-9
        rows, cols = np.nonzero(changed)
        assert len(rows) > 0

        covered = np.zeros_like(changed)
        for record in frame.annotations:
            left, top, width, height = record.box
            covered[
                max(0, int(math.floor(top)) - 1):int(math.ceil(top + height)) + 1,
                max(0, int(math.floor(left)) - 1):int(math.ceil(left + width)) + 1,
            ] = True
        assert covered[changed].all()

    def test_agent_pixels_backproject_into_box(self):
        base = default_scenario(seed=0, frame_count=1)
        agent = Agent(agent_id=1, start=(0.4, 6.5))
        scenario = replace(base, agents=(agent,))
        background = render_scenario(replace(base, agents=())).frames[0].depth.depth
        depth = render_scenario(scenario).frames[0].depth

        changed = depth.valid & (np.abs(depth.depth - background) > 1e-9)
        vs, us = np.nonzero(changed)
        assert len(vs) > 0
        points = to_ground_frame(
            scenario.plane, backproject_pixels(scenario.intrinsics, us, vs, depth.depth[vs, us])
        )
        box = agent.box(1, scenario.frame_rate)
        assert np.all(points >= box.min_corner - 0.01)
        assert np.all(points <= box.max_corner + 0.01)

    def test_occlusion_levels(self):
        base = default_scenario(seed=0, frame_count=1)
        scenario = replace(base, agents=(
            Agent(agent_id=1, start=(0.0, 5.0)),
            Agent(agent_id=2, start=(0.0, 8.0)),
        ))
        frame = render_scenario(scenario).frames[0]
        occlusion = {a.object_id: a.occlusion for a in frame.annotations}
        assert occlusion[1] == 0
        assert occlusion[2] > occlusion[1]

    def test_annotations_carry_ground_position(self, default_sequence):
        for frame in default_sequence.frames:
            assert len(frame.annotations) == len(frame.tracks)
            for record, box in zip(frame.annotations, frame.tracks):
                assert record.object_id == box.track_id
                assert record.ground_position == (box.center[0], box.center[1])

    def test_invalid_fraction(self):
        scenario = replace(default_scenario(seed=0, frame_count=1), agents=(), invalid_fraction=0.5)
        depth = render_scenario(scenario).frames[0].depth
        lower = depth.valid[130:]
        assert lower.mean() == pytest.approx(0.5, abs=0.05)

    def test_agent_outside_frustum(self):
        scenario = replace(default_scenario(seed=0, frame_count=1), agents=(Agent(agent_id=1, start=(30.0, 5.0)),))
        with pytest.raises(AgentOutsideFrustum):
            render_scenario(scenario)

    def test_default_agents_stay_visible(self):
        for seed in range(5):
            render_scenario(default_scenario(seed=seed, frame_count=40))


class TestScenarioDocument:
    def test_dict_round_trip(self):
        scenario = default_scenario(seed=3, agent_count=5, frame_count=12)
        assert scenario_from_dict(scenario_to_dict(scenario)) == scenario

    def test_file_round_trip(self, tmp_path):
        scenario = default_scenario(seed=1)
        path = tmp_path / "scenario.json"
        dump_scenario(scenario, path)
        assert load_scenario(path) == scenario

    def test_invalid_document(self, tmp_path):
        with pytest.raises(SynthError):
            scenario_from_dict({"agents": []})
        with pytest.raises(SynthError):
            scenario_from_dict({"camera": {"fx": 0, "fy": 1, "cx": 1, "cy": 1, "width": 4, "height": 4}})
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(SynthError):
            load_scenario(path)


def test_write_bundle(tmp_path, default_sequence):
    presets = complementary_presets(2, seed=0)
    written = write_bundle(default_sequence, tmp_path, presets, [DegraderConfig(source_id="det1")])

    for name in (Formats.CALIBRATION, Formats.ANNOTATIONS, Formats.GT_TRACKS, Formats.DETECTIONS):
        assert (tmp_path / name).is_file()
        assert written[name] == tmp_path / name
    assert len(list((tmp_path / Formats.DEPTH_DIR).glob("*.pgm"))) == len(default_sequence.frames)
    assert (tmp_path / Formats.SOURCES_DIR / "src1.trk").is_file()
    assert (tmp_path / Formats.SOURCES_DIR / "src2.trk").is_file()
    assert (tmp_path / Formats.SOURCES_DIR / "det1.txt").read_bytes() == (tmp_path / Formats.DETECTIONS).read_bytes()
