"""
Реестр типов узлов.

Узел - функция (параметры, директории входных узлов, выходная директория).
Артефакты ищутся во входах по фиксированным именам файлов (constants.Formats).
"""

import logging
import shutil
from collections import Counter
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Type, TypeVar

from ..config import ClusterConfig, FusionConfig, GridConfig, LifecycleConfig, MetricsConfig, PlaneFitConfig
from ..constants import Formats
from ..calibration import calibrate_ground_plane
from ..formats import (
    MotRecord,
    SchemaError,
    read_annotations,
    read_boxes3d,
    read_calibration,
    read_depth_dir,
    read_detections,
    read_mot,
    read_plane,
    read_safety_line,
    write_boxes3d,
    write_mot,
    write_plane,
    write_safety_report,
)
from ..fusion import fuse_sequence, safety_report
from ..lifting import BBox2D, BBox3D, lift_detections
from ..metrics import MatchMode, TaskSetting, evaluate_sequence, write_reports
from ..synth import DegraderConfig, complementary_presets, default_scenario, render_scenario, scenario_from_dict, write_bundle
from ..tracking import track_sequence
from .cache import file_digest
from .graph import MissingSource, PipelineError
from .sweep import gt_objects_from_annotations, hypotheses_from_boxes


logger = logging.getLogger(__name__)

C = TypeVar("C")

NodeFn = Callable[[Mapping[str, Any], Sequence[Path], Path], None]


@dataclass(frozen=True)
class NodeKind:
    """
    Тип узла.

    Attributes:
        name: Имя типа в графе
        run: Исполнение узла
        fingerprint: Отпечаток внешних данных для ключа кэша (например, входной файл)
    """
    name: str
    run: NodeFn
    fingerprint: Optional[Callable[[Mapping[str, Any]], Dict[str, Any]]] = None


def _section(cls: Type[C], params: Mapping[str, Any], name: str) -> C:
    """Dataclass конфигурации из раздела параметров (неуказанные поля - по умолчанию)."""
    section = dict(params.get(name, {}))
    known = {f.name for f in fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise PipelineError(f"Неизвестные параметры раздела '{name}': {sorted(unknown)}")
    for key, value in section.items():
        if isinstance(value, list):
            section[key] = tuple(value)
    return cls(**section)


def _find(inputs: Sequence[Path], name: str, required: bool = True) -> Optional[Path]:
    """Первый вход, содержащий артефакт name."""
    for directory in inputs:
        candidate = Path(directory) / name
        if candidate.exists():
            return candidate
    if required:
        raise PipelineError(f"Артефакт '{name}' не найден во входах")
    return None


def _detections_by_frame(inputs: Sequence[Path]) -> Dict[int, List[BBox2D]]:
    detections = _find(inputs, Formats.DETECTIONS, required=False)
    if detections is not None:
        return read_detections(detections)
    by_frame: Dict[int, List[BBox2D]] = {}
    for record in read_annotations(_find(inputs, Formats.ANNOTATIONS)):
        by_frame.setdefault(record.frame, []).append(record.to_bbox())
    return by_frame


def run_synth(params: Mapping[str, Any], inputs: Sequence[Path], out: Path) -> None:
    """
    Синтетическая последовательность и деградированные источники.

    Параметры: scenario (документ сценария) или seed/agent_count/frame_count;
    sources_3d, sources_2d, block, miss_probability, fp_rate, high_fp_rate,
    high_fp_source, noise_m, noise_px, fp_area.
    """
    seed = int(params.get("seed", 0))
    if "scenario" in params:
        scenario = scenario_from_dict(params["scenario"])
    else:
        scenario = default_scenario(
            seed=seed,
            agent_count=int(params.get("agent_count", 4)),
            frame_count=int(params.get("frame_count", 40)),
        )

    noise_px = float(params.get("noise_px", 2.0))
    miss_probability = float(params.get("miss_probability", 0.05))
    sources_3d = complementary_presets(
        int(params.get("sources_3d", 4)),
        block=int(params.get("block", 3)),
        miss_probability=miss_probability,
        noise_m=float(params.get("noise_m", 0.05)),
        noise_px=noise_px,
        high_fp_source=params.get("high_fp_source", 0),
        fp_rate=float(params.get("fp_rate", 0.1)),
        high_fp_rate=float(params.get("high_fp_rate", 1.0)),
        seed=seed,
    )
    sources_2d = [
        DegraderConfig(
            miss_probability=miss_probability,
            noise_px=noise_px,
            seed=seed * 1009 + 500 + k,
            source_id=f"det{k + 1}",
        )
        for k in range(int(params.get("sources_2d", 1)))
    ]
    fp_area = params.get("fp_area")
    write_bundle(
        render_scenario(scenario),
        out,
        sources_3d,
        sources_2d,
        tuple(fp_area) if fp_area is not None else None,
    )


def run_calibrate(params: Mapping[str, Any], inputs: Sequence[Path], out: Path) -> None:
    """Калибровка плоскости по картам глубины и 2D-детекциям -> plane.json."""
    cfg = _section(PlaneFitConfig, params, "plane_fit")
    intrinsics, _ = read_calibration(_find(inputs, Formats.CALIBRATION))
    depth_maps = read_depth_dir(_find(inputs, Formats.DEPTH_DIR))
    detections = _detections_by_frame(inputs)

    frames = sorted(depth_maps)
    max_frames = params.get("max_frames")
    if max_frames is not None:
        frames = frames[:int(max_frames)]
    result = calibrate_ground_plane(
        [depth_maps[f] for f in frames],
        [detections.get(f, []) for f in frames],
        intrinsics,
        cfg,
    )
    write_plane(result.plane, out / Formats.PLANE)


def _ingest_fingerprint(params: Mapping[str, Any]) -> Dict[str, Any]:
    path = params.get("path")
    return {"file_sha256": file_digest(path)} if path else {}


def run_ingest2d(params: Mapping[str, Any], inputs: Sequence[Path], out: Path) -> None:
    """
    Внешний 2D-результат в формате MOT -> detections.txt.

    Параметры: path (внешний файл) или source (имя в sources/ входа).
    """
    if "path" in params:
        source = Path(params["path"])
    elif "source" in params:
        source = _find(inputs, f"{Formats.SOURCES_DIR}/{params['source']}.txt", required=False)
        if source is None:
            raise MissingSource(f"2D-источник '{params['source']}' не найден во входах")
    else:
        raise PipelineError("ingest2d: нужен параметр path или source")
    records: List[MotRecord] = read_mot(source)
    write_mot(records, out / Formats.DETECTIONS)


def run_lift(params: Mapping[str, Any], inputs: Sequence[Path], out: Path) -> None:
    """2D-детекции + глубина + плоскость -> 3D-боксы (tracks.trk)."""
    source_id = str(params.get("source_id", "lift"))
    intrinsics, _ = read_calibration(_find(inputs, Formats.CALIBRATION))
    plane = read_plane(_find(inputs, Formats.PLANE))
    depth_maps = read_depth_dir(_find(inputs, Formats.DEPTH_DIR))
    detections = read_detections(_find(inputs, Formats.DETECTIONS), source_id=source_id)

    lifted: List[BBox3D] = []
    for frame in sorted(detections):
        if frame not in depth_maps:
            logger.warning(f"Кадр {frame}: нет карты глубины, детекции пропущены")
            continue
        lifted.extend(lift_detections(detections[frame], depth_maps[frame], intrinsics, plane))
    write_boxes3d(lifted, out / Formats.TRACKS)


def run_track3d(params: Mapping[str, Any], inputs: Sequence[Path], out: Path) -> None:
    """Трекер по карте занятости -> tracks.trk."""
    intrinsics, _ = read_calibration(_find(inputs, Formats.CALIBRATION))
    plane = read_plane(_find(inputs, Formats.PLANE))
    depth_maps = read_depth_dir(_find(inputs, Formats.DEPTH_DIR))
    frames = sorted(depth_maps)
    boxes = track_sequence(
        [depth_maps[f] for f in frames],
        intrinsics,
        plane,
        _section(GridConfig, params, "grid"),
        _section(ClusterConfig, params, "cluster"),
        _section(LifecycleConfig, params, "lifecycle"),
        frame_indices=frames,
    )
    write_boxes3d(boxes, out / Formats.TRACKS)


def _collect_sources(params: Mapping[str, Any], inputs: Sequence[Path]) -> Dict[str, List[BBox3D]]:
    """
    Источники фьюжна: именованные sources/<name>.trk или tracks.trk каждого входа.

    Имя источника из tracks.trk - колонка tracker_id; совпадения разводятся индексом входа.
    """
    sources: Dict[str, List[BBox3D]] = {}
    names = params.get("sources")
    if names:
        for name in names:
            path = _find(inputs, f"{Formats.SOURCES_DIR}/{name}.trk", required=False)
            if path is None:
                raise MissingSource(f"3D-источник '{name}' не найден во входах")
            sources[str(name)] = read_boxes3d(path)
        return sources

    per_input: Dict[tuple, List[BBox3D]] = {}
    for index, directory in enumerate(inputs):
        path = Path(directory) / Formats.TRACKS
        if not path.exists():
            continue
        for box in read_boxes3d(path):
            per_input.setdefault((index, box.source_id or f"input{index}"), []).append(box)
    if not per_input:
        raise MissingSource("Ни один вход не содержит tracks.trk")

    counts = Counter(name for _, name in per_input)
    for (index, name), boxes in per_input.items():
        sources[name if counts[name] == 1 else f"{name}#{index}"] = boxes
    return sources


def run_fuse(params: Mapping[str, Any], inputs: Sequence[Path], out: Path) -> None:
    """Фьюжн треков -> fused.trk (+ safety.json, если во входах есть линия безопасности)."""
    sources = _collect_sources(params, inputs)
    fused = fuse_sequence(sources, _section(FusionConfig, params, "fusion"))
    write_boxes3d(fused, out / Formats.FUSED)

    annotations = _find(inputs, Formats.ANNOTATIONS, required=False)
    if annotations is None:
        return
    try:
        line = read_safety_line(annotations)
    except SchemaError:
        logger.debug("Линия безопасности не задана, отчёт не строится")
        return
    write_safety_report(safety_report(fused, line), out / Formats.SAFETY_REPORT)


def run_eval(params: Mapping[str, Any], inputs: Sequence[Path], out: Path) -> None:
    """
    Оценка гипотез по эталону -> metrics.json и metrics.csv.

    Параметры: mode (plane_distance | image_iou), settings, metrics,
    hypotheses (имя артефакта; по умолчанию fused.trk, иначе tracks.trk).
    """
    mode = MatchMode(params.get("mode", MatchMode.PLANE_DISTANCE.value))
    settings = [TaskSetting(s) for s in params.get("settings", [s.value for s in TaskSetting])]
    cfg = _section(MetricsConfig, params, "metrics")

    hyp_name = params.get("hypotheses")
    if hyp_name:
        hyp_path = _find(inputs, str(hyp_name))
    else:
        hyp_path = _find(inputs, Formats.FUSED, required=False) or _find(inputs, Formats.TRACKS)

    intrinsics = plane = None
    if mode == MatchMode.IMAGE_IOU:
        intrinsics, _ = read_calibration(_find(inputs, Formats.CALIBRATION))
        plane = read_plane(_find(inputs, Formats.PLANE))

    gt = gt_objects_from_annotations(read_annotations(_find(inputs, Formats.ANNOTATIONS)), mode)
    hypotheses = hypotheses_from_boxes(read_boxes3d(hyp_path), mode, intrinsics, plane)
    rows = [
        {"hypotheses": hyp_path.name, "setting": setting.value,
         **evaluate_sequence(gt, hypotheses, mode, setting, cfg).as_row()}
        for setting in settings
    ]
    write_reports(rows, out / Formats.METRICS_CSV, out / Formats.METRICS_JSON)


REGISTRY: Dict[str, NodeKind] = {
    kind.name: kind
    for kind in (
        NodeKind("synth", run_synth),
        NodeKind("calibrate", run_calibrate),
        NodeKind("ingest2d", run_ingest2d, _ingest_fingerprint),
        NodeKind("lift", run_lift),
        NodeKind("track3d", run_track3d),
        NodeKind("fuse", run_fuse),
        NodeKind("eval", run_eval),
    )
}


def copy_artifacts(source: Path, target: Path) -> None:
    """Копирует артефакты узла (без метаданных кэша) в target."""
    target.mkdir(parents=True, exist_ok=True)
    for path in sorted(source.rglob("*")):
        if path.is_dir() or path.name == Formats.CACHE_META:
            continue
        destination = target / path.relative_to(source)
        destination.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(path, destination)
