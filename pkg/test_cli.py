"""
Тесты командного интерфейса: подкоманды на синтетическом наборе и коды возврата.
"""

import json

import pandas as pd
import pytest

from src.config import Config
from src.constants import Formats
from src.formats import read_boxes3d, write_plane
from src.pipeline import Graph, NodeSpec, dump_graph
from src.synth import default_scenario
from src.ui.cli import CLI


def _run(*argv):
    return CLI(Config()).run(list(argv))


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle")
    assert CLI(Config()).run(["synth", "--out", str(out), "--seed", "2", "--sources", "2"]) == 0
    write_plane(default_scenario(seed=2).plane, out / Formats.PLANE)
    return out


def test_synth_writes_bundle(bundle):
    for name in (Formats.CALIBRATION, Formats.ANNOTATIONS, Formats.GT_TRACKS, Formats.DETECTIONS):
        assert (bundle / name).is_file()
    assert sorted(p.name for p in (bundle / Formats.SOURCES_DIR).glob("*.trk")) == ["src1.trk", "src2.trk"]


def test_fuse_with_safety(bundle, tmp_path):
    sources = bundle / Formats.SOURCES_DIR
    out = tmp_path / Formats.FUSED
    code = _run(
        "fuse", "--tracks", f"{sources / 'src1.trk'},{sources / 'src2.trk'}",
        "--out", str(out), "--safety", str(bundle / Formats.ANNOTATIONS),
    )
    assert code == 0
    fused = read_boxes3d(out)
    assert fused
    assert {box.source_id for box in fused} == {"fused"}

    with open(tmp_path / Formats.SAFETY_REPORT, encoding="utf-8") as f:
        assert isinstance(json.load(f), list)


def test_eval_gt_tracks_is_perfect(bundle, tmp_path):
    code = _run(
        "eval", "--gt", str(bundle / Formats.ANNOTATIONS), "--tracks", str(bundle / Formats.GT_TRACKS),
        "--out-csv", str(tmp_path / "m.csv"), "--out-json", str(tmp_path / "m.json"),
    )
    assert code == 0
    frame = pd.read_csv(tmp_path / "m.csv")
    assert list(frame["setting"]) == ["ALL", "PEDS"]
    assert frame.loc[0, "MOTA"] == pytest.approx(1.0)
    assert frame.loc[0, "IDF1"] == pytest.approx(1.0)


def test_sweep(bundle, tmp_path):
    sources = bundle / Formats.SOURCES_DIR
    code = _run(
        "sweep", "--sources", f"{sources / 'src1.trk'},{sources / 'src2.trk'}",
        "--gt", str(bundle / Formats.ANNOTATIONS), "--out", str(tmp_path / "sweep.csv"),
    )
    assert code == 0
    frame = pd.read_csv(tmp_path / "sweep.csv")
    assert len(frame) == 6
    assert set(frame["combination"]) == {"src1", "src2", "src1+src2"}


def test_image_mode_needs_plane(bundle, tmp_path):
    code = _run(
        "eval", "--gt", str(bundle / Formats.ANNOTATIONS), "--tracks", str(bundle / Formats.GT_TRACKS),
        "--mode", "image_iou",
    )
    assert code == 1

    code = _run(
        "eval", "--gt", str(bundle / Formats.ANNOTATIONS), "--tracks", str(bundle / Formats.GT_TRACKS),
        "--mode", "image_iou", "--calibration", str(bundle / Formats.CALIBRATION),
        "--plane", str(bundle / Formats.PLANE), "--out-csv", str(tmp_path / "image.csv"),
    )
    assert code == 0
    assert (tmp_path / "image.csv").is_file()


def test_lift_and_track3d(bundle, tmp_path):
    common = [
        "--depth-dir", str(bundle / Formats.DEPTH_DIR),
        "--calibration", str(bundle / Formats.CALIBRATION),
        "--plane", str(bundle / Formats.PLANE),
    ]
    assert _run("lift", *common, "--detections", str(bundle / Formats.DETECTIONS),
                "--out", str(tmp_path / "lifted.trk")) == 0
    assert (tmp_path / "lifted.trk").is_file()

    assert _run("track3d", *common, "--out", str(tmp_path / Formats.TRACKS)) == 0
    assert (tmp_path / Formats.TRACKS).is_file()


def test_user_errors_return_one(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert _run("eval", "--gt", str(broken), "--tracks", str(tmp_path / "missing.trk")) == 1

    assert _run("fuse", "--tracks", str(tmp_path / "missing.trk"), "--out", str(tmp_path / "f.trk")) == 1


def test_out_of_range_flags_rejected(bundle, tmp_path):
    sources = bundle / Formats.SOURCES_DIR
    common = [
        "--depth-dir", str(bundle / Formats.DEPTH_DIR),
        "--calibration", str(bundle / Formats.CALIBRATION),
    ]
    assert _run(
        "fuse", "--tracks", f"{sources / 'src1.trk'},{sources / 'src2.trk'}",
        "--out", str(tmp_path / "f.trk"), "--iou", "1.5",
    ) == 1
    assert _run("track3d", *common, "--plane", str(bundle / Formats.PLANE),
                "--out", str(tmp_path / "t.trk"), "--gate", "-1") == 1
    assert _run("calibrate", *common, "--detections", str(bundle / Formats.DETECTIONS),
                "--out", str(tmp_path / "plane.json"), "--iterations", "0") == 1
    assert not any(tmp_path.iterdir())


def test_flags_leave_shared_config_untouched(bundle, tmp_path):
    config = Config()
    sources = bundle / Formats.SOURCES_DIR
    code = CLI(config).run([
        "fuse", "--tracks", f"{sources / 'src1.trk'},{sources / 'src2.trk'}",
        "--out", str(tmp_path / "f.trk"), "--iou", "0.5", "--staleness", "3",
    ])
    assert code == 0
    assert config.fusion.iou_threshold == 0.3
    assert config.fusion.staleness_limit == 15


def test_pipeline_run(tmp_path):
    graph = Graph((
        NodeSpec("synth", "synth", {"seed": 0, "agent_count": 2, "frame_count": 8, "sources_3d": 2}),
        NodeSpec("fuse", "fuse", {"sources": ["src1", "src2"]}, ("synth",)),
    ))
    path = tmp_path / "graph.json"
    dump_graph(graph, path)

    argv = ["pipeline", "run", str(path), "--cache-dir", str(tmp_path / "cache"), "--out", str(tmp_path / "out")]
    assert _run(*argv) == 0
    assert (tmp_path / "out" / "fuse" / Formats.FUSED).is_file()
    assert _run(*argv) == 0


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        _run("--version")
    assert info.value.code == 0
    assert "fusemot" in capsys.readouterr().out
