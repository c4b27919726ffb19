"""
Тесты форматов файлов: MOT, 3D-треки, карты глубины PGM, разметка,
калибровка и конвертер экспорта разметки.
"""

import json
import string

import numpy as np
import pytest

from src.constants import CameraViews
from src.fusion import DangerSide, SafetyLine
from src.geometry import CameraIntrinsics, plane_from_pose
from src.lifting import ClassLabel, DepthMap
from src.formats import (
    AnnotationRecord,
    BadMagic,
    FormatError,
    MotRecord,
    ParseError,
    SchemaError,
    Track3DRecord,
    TruncatedFile,
    convert_scalabel,
    depth_filename,
    parse_mot_line,
    read_annotations,
    read_calibration,
    read_depth,
    read_depth_dir,
    read_detections,
    read_mot,
    read_plane,
    read_safety_line,
    read_stereo_rig,
    read_tracks3d,
    write_annotations,
    write_calibration,
    write_depth,
    write_depth_dir,
    write_mot,
    write_plane,
    write_tracks3d,
)


class TestMot:
    def test_round_trip(self, tmp_path, rng):
        records = [
            MotRecord(
                frame=int(rng.integers(1, 500)),
                id=int(rng.integers(-1, 100)),
                bb_left=float(rng.uniform(-10, 1000)),
                bb_top=float(rng.uniform(-10, 1000)),
                bb_width=float(rng.uniform(0.5, 200)),
                bb_height=float(rng.uniform(0.5, 400)),
                conf=float(rng.uniform(0, 1)),
                x=float(rng.normal()),
                y=float(rng.normal()),
                z=-1.0,
            )
            for _ in range(1000)
        ]
        path = tmp_path / "det.txt"
        assert write_mot(records, path) == 1000
        assert read_mot(path) == records

    def test_short_lines_padded(self):
        record = parse_mot_line("3,7,10,20,30,40,0.9")
        assert (record.frame, record.id, record.conf) == (3, 7, 0.9)
        assert (record.x, record.y, record.z) == (-1.0, -1.0, -1.0)

    @pytest.mark.parametrize("text, column", [
        ("1,2,abc,4,5,6,1", 3),
        ("1,2,3,4,0,6,1", 5),
        ("1,2,3,4,5,-6,1", 6),
        ("0,2,3,4,5,6,1", 1),
        ("1,2.5,3,4,5,6,1", 2),
        ("1,2,3", 4),
    ])
    def test_parse_errors_have_column(self, text, column):
        with pytest.raises(ParseError) as info:
            parse_mot_line(text, 9)
        assert info.value.line == 9
        assert info.value.column == column

    def test_error_line_number_in_file(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("1,1,0,0,10,10,1\n\n2,1,0,0,x,10,1\n", encoding="utf-8")
        with pytest.raises(ParseError) as info:
            read_mot(path)
        assert (info.value.line, info.value.column) == (3, 5)

    def test_read_detections(self, tmp_path):
        path = tmp_path / "det.txt"
        write_mot([
            MotRecord(2, -1, 0.0, 0.0, 10.0, 20.0, 0.5),
            MotRecord(1, 4, 5.0, 5.0, 10.0, 20.0, 1.5),
        ], path)
        detections = read_detections(path, source_id="cam")
        assert list(detections) == [1, 2]
        assert detections[1][0].track_id == 4
        assert detections[1][0].confidence == 1.0
        assert detections[2][0].track_id is None
        assert detections[2][0].source_id == "cam"


class TestTracks3D:
    def test_round_trip(self, tmp_path, rng):
        letters = list(string.ascii_letters + string.digits + "_-.")
        records = [
            Track3DRecord(
                frame=int(rng.integers(1, 1000)),
                id=int(rng.integers(-1, 1000)),
                x=float(rng.normal(0, 5)),
                y=float(rng.uniform(0, 30)),
                z=float(rng.uniform(0, 2)),
                w=float(rng.uniform(0.1, 2)),
                h=float(rng.uniform(0.1, 2)),
                d=float(rng.uniform(0.1, 2)),
                conf=float(rng.uniform(0, 1)),
                tracker_id="".join(rng.choice(letters, size=int(rng.integers(0, 8)))),
            )
            for _ in range(1000)
        ]
        path = tmp_path / "tracks.trk"
        assert write_tracks3d(records, path) == 1000
        assert read_tracks3d(path) == records

    def test_box_conversion(self):
        record = Track3DRecord(3, 5, 1.0, 6.0, 0.85, 0.5, 1.7, 0.5, conf=0.8, tracker_id="occ")
        box = record.to_box()
        assert box.extent == (0.5, 1.7, 0.5)
        assert (box.track_id, box.frame_index, box.source_id) == (5, 3, "occ")
        assert Track3DRecord.from_box(box) == record

    def test_header_required(self, tmp_path):
        path = tmp_path / "tracks.trk"
        path.write_text("frame,id\n", encoding="utf-8")
        with pytest.raises(ParseError) as info:
            read_tracks3d(path)
        assert info.value.line == 1

    def test_bad_value_column(self, tmp_path):
        path = tmp_path / "tracks.trk"
        write_tracks3d([Track3DRecord(1, 1, 0.0, 5.0, 0.85, 0.5, 1.7, 0.5)], path)
        with open(path, "a", encoding="utf-8") as f:
            f.write("2,1,0,5,0.85,0.5,oops,0.5,0,1,a\n")
        with pytest.raises(ParseError) as info:
            read_tracks3d(path)
        assert (info.value.line, info.value.column) == (3, 7)

    def test_tracker_id_without_separator(self):
        with pytest.raises(ValueError):
            Track3DRecord(1, 1, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, tracker_id="a,b")


class TestDepthPgm:
    def test_round_trip(self, tmp_path, rng):
        for index in range(5):
            millimeters = rng.integers(1, 65536, size=(20, 10))
            valid = rng.random((20, 10)) > 0.2
            depth = DepthMap(depth=np.where(valid, millimeters / 1000.0, 0.0), valid=valid)
            path = tmp_path / f"{index}.pgm"
            write_depth(depth, path)

            back = read_depth(path)
            assert np.array_equal(back.valid, valid)
            assert np.array_equal(back.depth, depth.depth)

    def test_header_layout(self, tmp_path):
        depth = DepthMap.from_array(np.full((2, 3), 1.5))
        path = tmp_path / "d.pgm"
        write_depth(depth, path)
        data = path.read_bytes()
        assert data.startswith(b"P5\n3 2\n65535\n")
        assert data[-2:] == (1500).to_bytes(2, "big")

    def test_header_comments(self, tmp_path):
        path = tmp_path / "d.pgm"
        path.write_bytes(b"P5\n# comment\n2 1\n# another\n65535\n" + (2000).to_bytes(2, "big") + (0).to_bytes(2, "big"))
        depth = read_depth(path)
        assert depth.valid.tolist() == [[True, False]]
        assert depth.depth[0, 0] == pytest.approx(2.0)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "d.pgm"
        path.write_bytes(b"P2\n2 2\n255\n1 2 3 4\n")
        with pytest.raises(BadMagic):
            read_depth(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "d.pgm"
        path.write_bytes(b"P5\n4 4\n65535\n" + bytes(10))
        with pytest.raises(TruncatedFile):
            read_depth(path)
        path.write_bytes(b"P5\n4 4")
        with pytest.raises(TruncatedFile):
            read_depth(path)

    def test_far_depth_clipped(self, tmp_path):
        depth = DepthMap.from_array(np.array([[100.0]]))
        path = tmp_path / "d.pgm"
        write_depth(depth, path)
        assert read_depth(path).depth[0, 0] == pytest.approx(65.535)

    def test_directory(self, tmp_path):
        maps = {12: DepthMap.from_array(np.full((2, 2), 1.0)), 1: DepthMap.from_array(np.full((2, 2), 2.0))}
        write_depth_dir(maps, tmp_path / "depth")
        assert depth_filename(12) == "000012.pgm"
        loaded = read_depth_dir(tmp_path / "depth")
        assert list(loaded) == [1, 12]
        assert loaded[1].depth[0, 0] == pytest.approx(2.0)

        (tmp_path / "depth" / "left.pgm").write_bytes(b"P5\n1 1\n65535\n\x00\x01")
        with pytest.raises(FormatError):
            read_depth_dir(tmp_path / "depth")


def _random_annotation(rng) -> AnnotationRecord:
    labels = list(ClassLabel)
    levels = [0, 25, 50, 75, 100]
    has_ground = rng.random() < 0.5
    return AnnotationRecord(
        frame=int(rng.integers(1, 300)),
        object_id=int(rng.integers(1, 10000)),
        class_label=labels[int(rng.integers(len(labels)))],
        box=tuple(float(v) for v in rng.uniform(1.0, 500.0, 4)),
        occlusion=levels[int(rng.integers(len(levels)))],
        camera_view=CameraViews.RIGHT_RIG if rng.random() < 0.5 else CameraViews.LEFT_RIG,
        ground_position=tuple(float(v) for v in rng.normal(0, 5, 2)) if has_ground else None,
    )


class TestAnnotations:
    def test_round_trip(self, tmp_path, rng):
        records = [_random_annotation(rng) for _ in range(1000)]
        line = SafetyLine(points=((-6.0, 5.0), (6.0, 5.0)), danger_side=DangerSide.RIGHT)
        path = tmp_path / "annotations.json"
        write_annotations(records, path, line)

        assert read_annotations(path) == records
        assert read_safety_line(path) == line

    def _write(self, tmp_path, document):
        path = tmp_path / "annotations.json"
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f)
        return path

    @pytest.mark.parametrize("item, pointer", [
        ({"frame": 1, "id": 1, "class": "person", "box": [0, 0, 1, 1], "occlusion": 30, "camera_view": "left_rig"},
         "/annotations/1/occlusion"),
        ({"frame": 1, "id": 1, "class": "person", "occlusion": 0, "camera_view": "left_rig"},
         "/annotations/1/box"),
        ({"frame": 1, "id": 1, "class": "cat", "box": [0, 0, 1, 1], "occlusion": 0, "camera_view": "left_rig"},
         "/annotations/1/class"),
        ({"frame": "1", "id": 1, "class": "person", "box": [0, 0, 1, 1], "occlusion": 0, "camera_view": "left_rig"},
         "/annotations/1/frame"),
        ({"frame": 1, "id": 1, "class": "person", "box": [0, 0, 1, "x"], "occlusion": 0, "camera_view": "left_rig"},
         "/annotations/1/box/3"),
    ])
    def test_schema_error_pointer(self, tmp_path, item, pointer):
        good = {"frame": 1, "id": 1, "class": "person", "box": [0, 0, 1, 1], "occlusion": 0, "camera_view": "left_rig"}
        path = self._write(tmp_path, {"version": 1, "annotations": [good, item]})
        with pytest.raises(SchemaError) as info:
            read_annotations(path)
        assert info.value.pointer == pointer

    def test_version_checked(self, tmp_path):
        path = self._write(tmp_path, {"version": 2, "annotations": []})
        with pytest.raises(SchemaError) as info:
            read_annotations(path)
        assert info.value.pointer == "/version"

    def test_missing_safety_line(self, tmp_path):
        path = self._write(tmp_path, {"version": 1, "annotations": []})
        with pytest.raises(SchemaError):
            read_safety_line(path)


class TestCalibration:
    def test_camera_round_trip(self, tmp_path):
        intrinsics = CameraIntrinsics(fx=300.0, fy=301.5, cx=160.0, cy=120.0, width=320, height=240)
        path = tmp_path / "calibration.json"
        write_calibration(intrinsics, path, baseline=0.12)
        assert read_calibration(path) == (intrinsics, 0.12)
        assert read_stereo_rig(path).baseline == pytest.approx(0.12)

    def test_missing_key(self, tmp_path):
        path = tmp_path / "calibration.json"
        path.write_text('{"fy": 1, "cx": 1, "cy": 1, "width": 4, "height": 4}', encoding="utf-8")
        with pytest.raises(SchemaError) as info:
            read_calibration(path)
        assert info.value.pointer == "/fx"

    def test_stereo_needs_baseline(self, tmp_path):
        path = tmp_path / "calibration.json"
        write_calibration(CameraIntrinsics(1.0, 1.0, 1.0, 1.0, 4, 4), path)
        with pytest.raises(SchemaError):
            read_stereo_rig(path)

    def test_plane_round_trip(self, tmp_path):
        plane = plane_from_pose(3.0, 0.35)
        path = tmp_path / "plane.json"
        write_plane(plane, path)
        back = read_plane(path)
        assert np.allclose(back.normal, plane.normal)
        assert back.offset == pytest.approx(plane.offset)
        with open(path, encoding="utf-8") as f:
            assert np.allclose(json.load(f)["to_plane"], plane.to_plane)


class TestScalabel:
    def test_conversion(self):
        export = [
            {"frameIndex": 0, "labels": [
                {"id": "a", "category": "pedestrian", "box2d": {"x1": 10, "y1": 20, "x2": 40, "y2": 100},
                 "attributes": {"occlusion": "50%"}},
                {"id": "17", "category": "stroller", "box2d": {"x1": 0, "y1": 0, "x2": 5, "y2": 5}},
            ]},
            {"frameIndex": 1, "labels": [
                {"id": "b", "category": "dog", "box2d": {"x1": 0, "y1": 0, "x2": 5, "y2": 5}},
                {"id": "a", "category": "person", "box2d": {"x1": 12, "y1": 20, "x2": 42, "y2": 100}},
                {"id": "c", "category": "person", "poly2d": []},
            ]},
        ]
        records = convert_scalabel(export)
        assert [(r.frame, r.object_id, r.class_label) for r in records] == [
            (1, 1, ClassLabel.PERSON),
            (1, 17, ClassLabel.BUGGY),
            (2, 2, ClassLabel.OBJECT),
            (2, 1, ClassLabel.PERSON),
        ]
        assert records[0].box == (10.0, 20.0, 30.0, 80.0)
        assert records[0].occlusion == 50

    def test_errors(self, tmp_path):
        with pytest.raises(SchemaError) as info:
            convert_scalabel([{"labels": [{"id": "a", "box2d": {"x1": 5, "y1": 0, "x2": 5, "y2": 5}}]}])
        assert info.value.pointer == "/0/labels/0/box2d"

        with pytest.raises(SchemaError) as info:
            convert_scalabel([{"labels": [
                {"id": "a", "box2d": {"x1": 0, "y1": 0, "x2": 5, "y2": 5}, "attributes": {"occlusion": "30"}},
            ]}])
        assert info.value.pointer == "/0/labels/0/attributes/occlusion"

        path = tmp_path / "export.json"
        path.write_text('{"frames": []}', encoding="utf-8")
        with pytest.raises(SchemaError):
            convert_scalabel(path)
