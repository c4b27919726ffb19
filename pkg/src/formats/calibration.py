"""
JSON-файлы камеры и плоскости платформы.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ..geometry import CameraIntrinsics, GeometryError, GroundPlane, InvalidCameraModel, StereoRig
from .errors import SchemaError

_CAMERA_KEYS = ("fx", "fy", "cx", "cy", "width", "height")


def _read_json(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"некорректный JSON: {e}") from e
    if not isinstance(document, dict):
        raise SchemaError("ожидался объект")
    return document


def _write_json(document: Dict[str, Any], path: Union[str, Path]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, ensure_ascii=False)
        f.write("\n")


def read_calibration(path: Union[str, Path]) -> Tuple[CameraIntrinsics, Optional[float]]:
    """
    Читает параметры камеры.

    Returns:
        Tuple: (intrinsics, baseline_m или None)
    """
    document = _read_json(path)
    for key in _CAMERA_KEYS:
        if key not in document:
            raise SchemaError(f"отсутствует ключ '{key}'", f"/{key}")
    try:
        intrinsics = CameraIntrinsics(
            fx=float(document["fx"]),
            fy=float(document["fy"]),
            cx=float(document["cx"]),
            cy=float(document["cy"]),
            width=int(document["width"]),
            height=int(document["height"]),
        )
    except (TypeError, ValueError, InvalidCameraModel) as e:
        raise SchemaError(str(e)) from e

    baseline = document.get("baseline_m")
    return intrinsics, float(baseline) if baseline is not None else None


def read_stereo_rig(path: Union[str, Path]) -> StereoRig:
    intrinsics, baseline = read_calibration(path)
    if baseline is None:
        raise SchemaError("отсутствует ключ 'baseline_m'", "/baseline_m")
    return StereoRig(intrinsics=intrinsics, baseline=baseline)


def write_calibration(
    intrinsics: CameraIntrinsics,
    path: Union[str, Path],
    baseline: Optional[float] = None,
) -> None:
    document: Dict[str, Any] = {
        "fx": intrinsics.fx,
        "fy": intrinsics.fy,
        "cx": intrinsics.cx,
        "cy": intrinsics.cy,
        "width": intrinsics.width,
        "height": intrinsics.height,
    }
    if baseline is not None:
        document["baseline_m"] = baseline
    _write_json(document, path)


def read_plane(path: Union[str, Path]) -> GroundPlane:
    """Плоскость из normal и offset_m; to_plane в файле справочный."""
    document = _read_json(path)
    for key in ("normal", "offset_m"):
        if key not in document:
            raise SchemaError(f"отсутствует ключ '{key}'", f"/{key}")
    normal = document["normal"]
    if not isinstance(normal, list) or len(normal) != 3:
        raise SchemaError("ожидался вектор из 3 чисел", "/normal")
    try:
        return GroundPlane.from_normal_offset(np.asarray(normal, dtype=np.float64), float(document["offset_m"]))
    except (TypeError, ValueError, GeometryError) as e:
        raise SchemaError(str(e), "/normal") from e


def write_plane(plane: GroundPlane, path: Union[str, Path]) -> None:
    _write_json({
        "normal": [float(v) for v in plane.normal],
        "offset_m": float(plane.offset),
        "to_plane": [[float(v) for v in row] for row in plane.to_plane],
    }, path)
