"""
Запись синтетической последовательности на диск в форматах артефактов:
калибровка, карты глубины, разметка, эталонные 3D-треки и деградированные
выходы источников.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

from ..constants import Formats
from ..formats import write_annotations, write_boxes3d, write_calibration, write_depth_dir, write_mot
from .degrader import DegraderConfig, degrade, degrade_detections
from .renderer import SynthSequence


logger = logging.getLogger(__name__)


def write_bundle(
    sequence: SynthSequence,
    out_dir: Union[str, Path],
    sources_3d: Sequence[DegraderConfig] = (),
    sources_2d: Sequence[DegraderConfig] = (),
    fp_area: Optional[Tuple[float, float, float, float]] = None,
) -> Dict[str, Path]:
    """
    Записывает последовательность и выходы источников.

    Структура директории:
        calibration.json, depth/NNNNNN.pgm, annotations.json, gt.trk,
        sources/<source_id>.trk (3D), sources/<source_id>.txt (2D),
        detections.txt - копия первого 2D-источника

    Returns:
        Dict[str, Path]: Имя артефакта -> путь
    """
    out = Path(out_dir)
    scenario = sequence.scenario
    written: Dict[str, Path] = {}

    written[Formats.CALIBRATION] = out / Formats.CALIBRATION
    write_calibration(scenario.intrinsics, written[Formats.CALIBRATION])

    written[Formats.DEPTH_DIR] = out / Formats.DEPTH_DIR
    write_depth_dir({f.frame: f.depth for f in sequence.frames}, written[Formats.DEPTH_DIR])

    written[Formats.ANNOTATIONS] = out / Formats.ANNOTATIONS
    write_annotations(sequence.annotations, written[Formats.ANNOTATIONS], scenario.safety_line)

    written[Formats.GT_TRACKS] = out / Formats.GT_TRACKS
    write_boxes3d(sequence.gt_tracks, written[Formats.GT_TRACKS])

    sources_dir = out / Formats.SOURCES_DIR
    for cfg in sources_3d:
        path = sources_dir / f"{cfg.source_id}.trk"
        write_boxes3d(degrade(sequence.gt_tracks, cfg, fp_area), path)
        written[path.name] = path

    image_size = (scenario.intrinsics.width, scenario.intrinsics.height)
    frames = list(scenario.frames)
    for index, cfg in enumerate(sources_2d):
        records = degrade_detections(sequence.annotations, cfg, image_size, frames)
        path = sources_dir / f"{cfg.source_id}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        write_mot(records, path)
        written[path.name] = path
        if index == 0:
            written[Formats.DETECTIONS] = out / Formats.DETECTIONS
            write_mot(records, written[Formats.DETECTIONS])

    logger.info(f"Синтетика записана в {out}: источников 3D {len(sources_3d)}, 2D {len(sources_2d)}")
    return written
