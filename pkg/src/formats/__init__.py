"""
Модуль форматов файлов.

Детекции и треки (MOT), 3D-треки, карты глубины PGM,
разметка и параметры калибровки в JSON.
"""

from .errors import FormatError, ParseError, BadMagic, TruncatedFile, SchemaError, format_float
from .mot import MotRecord, parse_mot_line, read_mot, write_mot, group_by_frame, read_detections
from .tracks3d import Track3DRecord, read_tracks3d, write_tracks3d, read_boxes3d, write_boxes3d
from .depth_pgm import (
    read_depth,
    write_depth,
    depth_to_millimeters,
    depth_filename,
    read_depth_dir,
    write_depth_dir,
)
from .annotations import (
    AnnotationRecord,
    read_annotations,
    read_safety_line,
    write_annotations,
    write_safety_report,
)
from .calibration import read_calibration, read_stereo_rig, write_calibration, read_plane, write_plane
from .scalabel import convert_scalabel

__all__ = [
    "FormatError",
    "ParseError",
    "BadMagic",
    "TruncatedFile",
    "SchemaError",
    "format_float",
    "MotRecord",
    "parse_mot_line",
    "read_mot",
    "write_mot",
    "group_by_frame",
    "read_detections",
    "Track3DRecord",
    "read_tracks3d",
    "write_tracks3d",
    "read_boxes3d",
    "write_boxes3d",
    "read_depth",
    "write_depth",
    "depth_to_millimeters",
    "depth_filename",
    "read_depth_dir",
    "write_depth_dir",
    "AnnotationRecord",
    "read_annotations",
    "read_safety_line",
    "write_annotations",
    "write_safety_report",
    "read_calibration",
    "read_stereo_rig",
    "write_calibration",
    "read_plane",
    "write_plane",
    "convert_scalabel",
]
