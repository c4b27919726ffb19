"""
CLI - командный интерфейс fusemot.

Подкоманды повторяют типы узлов пайплайна; вывод через rich
(таблицы метрик, прогресс перебора, панели ошибок).
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from ..calibration import CalibrationError, calibrate_ground_plane
from ..config import Config, get_config
from ..constants import CameraViews, Formats
from ..formats import (
    FormatError,
    convert_scalabel,
    read_annotations,
    read_boxes3d,
    read_calibration,
    read_depth_dir,
    read_detections,
    read_plane,
    read_safety_line,
    write_annotations,
    write_boxes3d,
    write_plane,
    write_safety_report,
)
from ..fusion import FusionError, fuse_sequence, safety_report
from ..geometry import GeometryError
from ..lifting import BBox3D, DepthLiftError, lift_detections
from ..metrics import MatchMode, MetricsError, TaskSetting, evaluate_sequence, write_reports
from ..pipeline import (
    CacheStore,
    PipelineError,
    copy_artifacts,
    enumerate_combinations,
    gt_objects_from_annotations,
    hypotheses_from_boxes,
    load_graph,
    run_graph,
    sweep_eval,
)
from ..synth import (
    DegraderConfig,
    SynthError,
    complementary_presets,
    default_scenario,
    load_scenario,
    render_scenario,
    write_bundle,
)
from ..tracking import TrackingError, track_sequence

logger = logging.getLogger(__name__)


# Версия приложения
VERSION = "1.0.0"

# Ошибки, которые показываются пользователю панелью без трассировки
_USER_ERRORS = (
    PipelineError,
    FormatError,
    CalibrationError,
    FusionError,
    MetricsError,
    SynthError,
    GeometryError,
    DepthLiftError,
    TrackingError,
    ValueError,
    FileNotFoundError,
)


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _source_names(paths: Sequence[Path]) -> List[str]:
    """Имена источников по именам файлов; совпадающие - по полному пути."""
    stems = [p.stem for p in paths]
    return [p.stem if stems.count(p.stem) == 1 else str(p) for p in paths]


class CLI:
    """
    Командный интерфейс fusemot.

    Example:
        ```python
        cli = CLI()
        exit_code = cli.run(["sweep", "--sources", "a.trk,b.trk", "--gt", "gt.json", "--out", "r.csv"])
        ```
    """

    def __init__(self, config: Optional[Config] = None):
        self.console = Console()
        self.config = config or get_config()
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        cfg = self.config
        parser = argparse.ArgumentParser(
            prog="fusemot",
            description="3D-подъём, фьюжн и оценка результатов многообъектного трекинга",
        )
        parser.add_argument("--version", action="version", version=f"fusemot {VERSION}")
        commands = parser.add_subparsers(dest="command", required=True)

        pipeline = commands.add_parser("pipeline", help="Исполнение графа узлов")
        pipeline_commands = pipeline.add_subparsers(dest="pipeline_command", required=True)
        run = pipeline_commands.add_parser("run", help="Исполнить граф с кэшированием")
        run.add_argument("graph", type=Path)
        run.add_argument("--cache-dir", type=Path, default=cfg.pipeline.cache_dir, help="По умолчанию FUSEMOT_CACHE_DIR")
        run.add_argument("--workers", type=int, default=cfg.pipeline.max_workers)
        run.add_argument("--out", type=Path, help="Скопировать артефакты узлов в out/<node_id>")

        sweep = commands.add_parser("sweep", help="Оценка всех комбинаций источников")
        sweep.add_argument("--sources", required=True, help="Файлы 3D-треков через запятую")
        sweep.add_argument("--gt", type=Path, required=True, help="Файл разметки")
        sweep.add_argument("--out", type=Path, required=True, help="CSV с результатами")
        sweep.add_argument("--json", type=Path, help="JSON с результатами")
        sweep.add_argument("--mode", choices=[m.value for m in MatchMode], default=MatchMode.PLANE_DISTANCE.value)
        sweep.add_argument("--calibration", type=Path, help="Параметры камеры (режим image_iou)")
        sweep.add_argument("--plane", type=Path, help="Плоскость (режим image_iou)")

        calibrate = commands.add_parser("calibrate", help="Автокалибровка плоскости платформы")
        calibrate.add_argument("--depth-dir", type=Path, required=True)
        calibrate.add_argument("--calibration", type=Path, required=True)
        calibrate.add_argument("--detections", type=Path, required=True)
        calibrate.add_argument("--out", type=Path, required=True)
        calibrate.add_argument("--iterations", type=int, default=cfg.plane_fit.ransac_iterations)
        calibrate.add_argument("--threshold", type=float, default=cfg.plane_fit.inlier_threshold)
        calibrate.add_argument("--seed", type=int, default=cfg.plane_fit.rng_seed)
        calibrate.add_argument("--no-mask", action="store_true", help="Все валидные пиксели, без маски")

        lift = commands.add_parser("lift", help="Подъём 2D-детекций в 3D")
        lift.add_argument("--depth-dir", type=Path, required=True)
        lift.add_argument("--calibration", type=Path, required=True)
        lift.add_argument("--plane", type=Path, required=True)
        lift.add_argument("--detections", type=Path, required=True)
        lift.add_argument("--out", type=Path, required=True)
        lift.add_argument("--source-id", default="lift")

        track3d = commands.add_parser("track3d", help="3D-трекинг по карте занятости")
        track3d.add_argument("--depth-dir", type=Path, required=True)
        track3d.add_argument("--calibration", type=Path, required=True)
        track3d.add_argument("--plane", type=Path, required=True)
        track3d.add_argument("--out", type=Path, required=True)
        track3d.add_argument("--cell-size", type=float, default=cfg.grid.cell_size)
        track3d.add_argument("--gate", type=float, default=cfg.lifecycle.gate)
        track3d.add_argument("--confirm-hits", type=int, default=cfg.lifecycle.confirm_hits)
        track3d.add_argument("--max-misses", type=int, default=cfg.lifecycle.max_misses)
        track3d.add_argument("--frame-rate", type=float, default=cfg.lifecycle.frame_rate)

        fuse = commands.add_parser("fuse", help="Фьюжн треков нескольких источников")
        fuse.add_argument("--tracks", required=True, help="Файлы 3D-треков через запятую")
        fuse.add_argument("--out", type=Path, required=True)
        fuse.add_argument("--iou", type=float, default=cfg.fusion.iou_threshold)
        fuse.add_argument("--ioe", type=float, default=cfg.fusion.ioe_threshold)
        fuse.add_argument("--staleness", type=int, default=cfg.fusion.staleness_limit)
        fuse.add_argument("--safety", type=Path, help="Разметка с линией безопасности")
        fuse.add_argument("--safety-out", type=Path, help="Отчёт о нарушениях (JSON)")

        evaluate = commands.add_parser("eval", help="Оценка треков по разметке")
        evaluate.add_argument("--gt", type=Path, required=True)
        evaluate.add_argument("--tracks", type=Path, required=True)
        evaluate.add_argument("--mode", choices=[m.value for m in MatchMode], default=MatchMode.PLANE_DISTANCE.value)
        evaluate.add_argument("--calibration", type=Path)
        evaluate.add_argument("--plane", type=Path)
        evaluate.add_argument("--out-csv", type=Path)
        evaluate.add_argument("--out-json", type=Path)

        synth = commands.add_parser("synth", help="Синтетическая последовательность")
        synth.add_argument("--scenario", type=Path, help="JSON сценария (по умолчанию - типовая сцена)")
        synth.add_argument("--out", type=Path, required=True)
        synth.add_argument("--seed", type=int, default=0)
        synth.add_argument("--sources", type=int, default=4, help="Число деградированных 3D-источников")
        synth.add_argument("--detectors", type=int, default=1, help="Число деградированных 2D-источников")
        synth.add_argument("--block", type=int, default=3, help="Длина блока выпадений (кадры)")
        synth.add_argument("--miss", type=float, default=0.05)
        synth.add_argument("--fp-rate", type=float, default=0.1)
        synth.add_argument("--high-fp-rate", type=float, default=1.0)

        convert = commands.add_parser("convert-annotations", help="Экспорт инструмента разметки -> JSON разметки")
        convert.add_argument("--input", type=Path, required=True)
        convert.add_argument("--out", type=Path, required=True)
        convert.add_argument("--camera-view", choices=sorted(CameraViews.ALL), default=CameraViews.LEFT_RIG)

        return parser

    def _print_report(self, frame: pd.DataFrame, title: str) -> None:
        """Таблица метрик: доли в процентах, как в таблицах результатов."""
        table = Table(title=title, box=box.ROUNDED, show_header=True, header_style="bold cyan")
        for column in frame.columns:
            table.add_column(str(column), justify="left" if frame[column].dtype == object else "right")
        percent = {"IDF1", "IDP", "IDR", "Rcll", "Prcn", "MOTA"}
        for _, row in frame.iterrows():
            cells = []
            for column, value in row.items():
                if column in percent and isinstance(value, float):
                    cells.append("—" if pd.isna(value) else f"{value * 100:.1f}")
                elif isinstance(value, float):
                    cells.append("—" if pd.isna(value) else f"{value:.3f}")
                else:
                    cells.append(str(value))
            table.add_row(*cells)
        self.console.print()
        self.console.print(table)

    def _print_error(self, error: BaseException) -> None:
        node = getattr(error, "node_id", None)
        title = f"[bold red]Ошибка в узле {node}[/bold red]" if node else "[bold red]Ошибка[/bold red]"
        self.console.print(Panel(f"[white]{error}[/white]", title=title, border_style="red", box=box.ROUNDED))

    def _cmd_pipeline(self, args: argparse.Namespace) -> None:
        graph = load_graph(args.graph)
        cache = CacheStore(args.cache_dir)
        with self.console.status("[bold]Исполнение графа...[/bold]"):
            result = run_graph(graph, cache, max_workers=args.workers)

        table = Table(title="Узлы", box=box.ROUNDED, header_style="bold cyan")
        table.add_column("Узел", style="cyan")
        table.add_column("Тип")
        table.add_column("Кэш")
        table.add_column("Ключ", style="dim")
        for node_id in result.order:
            run = result.log[node_id]
            status = "[green]попадание[/green]" if run.cached else "[yellow]исполнен[/yellow]"
            table.add_row(node_id, run.kind, status, run.key[:12])
        self.console.print(table)

        if args.out:
            for node_id, path in result.outputs.items():
                copy_artifacts(path, args.out / node_id)
            self.console.print(f"[green]✓[/green] Артефакты скопированы в {args.out}")

    def _cmd_sweep(self, args: argparse.Namespace) -> None:
        paths = [Path(p) for p in _split(args.sources)]
        names = _source_names(paths)
        sources: Dict[str, List[BBox3D]] = {name: read_boxes3d(path) for name, path in zip(names, paths)}
        gt = read_annotations(args.gt)
        mode = MatchMode(args.mode)
        intrinsics = plane = None
        if mode == MatchMode.IMAGE_IOU:
            if not (args.calibration and args.plane):
                raise ValueError("Режим image_iou требует --calibration и --plane")
            intrinsics, _ = read_calibration(args.calibration)
            plane = read_plane(args.plane)

        total = len(enumerate_combinations(len(names)))
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(),
            console=self.console,
        ) as progress:
            task = progress.add_task("Комбинации", total=total)
            frame = sweep_eval(
                sources, gt, names,
                mode=mode,
                fusion_cfg=self.config.fusion,
                metrics_cfg=self.config.metrics,
                intrinsics=intrinsics,
                plane=plane,
                progress=lambda subset: progress.advance(task),
            )

        write_reports(frame.to_dict("records"), args.out, args.json)
        self._print_report(frame, f"Комбинации источников ({total})")
        self.console.print(f"[green]✓[/green] Результаты: {args.out}")

    def _cmd_calibrate(self, args: argparse.Namespace) -> None:
        cfg = replace(
            self.config.plane_fit,
            ransac_iterations=args.iterations,
            inlier_threshold=args.threshold,
            rng_seed=args.seed,
            use_walkable_mask=not args.no_mask,
        )

        intrinsics, _ = read_calibration(args.calibration)
        depth_maps = read_depth_dir(args.depth_dir)
        detections = read_detections(args.detections)
        frames = sorted(depth_maps)
        result = calibrate_ground_plane(
            [depth_maps[f] for f in frames],
            [detections.get(f, []) for f in frames],
            intrinsics,
            cfg,
        )
        write_plane(result.plane, args.out)

        table = Table(title="Плоскость платформы", box=box.ROUNDED)
        table.add_column("Параметр", style="cyan")
        table.add_column("Значение")
        table.add_row("Нормаль", ", ".join(f"{v:.4f}" for v in result.plane.normal))
        table.add_row("Высота камеры (м)", f"{result.validation.camera_height:.3f}")
        width = result.validation.platform_width
        table.add_row("Ширина платформы (м)", "—" if width is None else f"{width:.2f}")
        table.add_row("Инлаеры", f"{result.fit.inlier_count} ({result.fit.inlier_fraction:.1%})")
        self.console.print(table)

    def _cmd_lift(self, args: argparse.Namespace) -> None:
        intrinsics, _ = read_calibration(args.calibration)
        plane = read_plane(args.plane)
        depth_maps = read_depth_dir(args.depth_dir)
        detections = read_detections(args.detections, source_id=args.source_id)
        lifted: List[BBox3D] = []
        for frame in sorted(detections):
            if frame in depth_maps:
                lifted.extend(lift_detections(detections[frame], depth_maps[frame], intrinsics, plane))
        count = write_boxes3d(lifted, args.out)
        self.console.print(f"[green]✓[/green] 3D-боксов: {count} -> {args.out}")

    def _cmd_track3d(self, args: argparse.Namespace) -> None:
        grid = replace(self.config.grid, cell_size=args.cell_size)
        lifecycle = replace(
            self.config.lifecycle,
            gate=args.gate,
            confirm_hits=args.confirm_hits,
            max_misses=args.max_misses,
            frame_rate=args.frame_rate,
        )

        intrinsics, _ = read_calibration(args.calibration)
        plane = read_plane(args.plane)
        depth_maps = read_depth_dir(args.depth_dir)
        frames = sorted(depth_maps)
        boxes = track_sequence(
            [depth_maps[f] for f in frames], intrinsics, plane,
            grid, self.config.cluster, lifecycle, frame_indices=frames,
        )
        count = write_boxes3d(boxes, args.out)
        tracks = len({b.track_id for b in boxes})
        self.console.print(f"[green]✓[/green] Треков: {tracks}, боксов: {count} -> {args.out}")

    def _cmd_fuse(self, args: argparse.Namespace) -> None:
        fusion = replace(
            self.config.fusion,
            iou_threshold=args.iou,
            ioe_threshold=args.ioe,
            staleness_limit=args.staleness,
        )

        paths = [Path(p) for p in _split(args.tracks)]
        sources = {name: read_boxes3d(path) for name, path in zip(_source_names(paths), paths)}
        fused = fuse_sequence(sources, fusion)
        count = write_boxes3d(fused, args.out)
        self.console.print(
            f"[green]✓[/green] Источников: {len(sources)}, фьюжн-треков: "
            f"{len({b.track_id for b in fused})}, боксов: {count} -> {args.out}"
        )

        if args.safety:
            violations = safety_report(fused, read_safety_line(args.safety))
            out = args.safety_out or args.out.with_name(Formats.SAFETY_REPORT)
            write_safety_report(violations, out)
            style = "red" if violations else "green"
            self.console.print(f"[{style}]Нарушений линии безопасности: {len(violations)}[/{style}] -> {out}")

    def _cmd_eval(self, args: argparse.Namespace) -> None:
        mode = MatchMode(args.mode)
        intrinsics = plane = None
        if mode == MatchMode.IMAGE_IOU:
            if not (args.calibration and args.plane):
                raise ValueError("Режим image_iou требует --calibration и --plane")
            intrinsics, _ = read_calibration(args.calibration)
            plane = read_plane(args.plane)

        gt = gt_objects_from_annotations(read_annotations(args.gt), mode)
        hypotheses = hypotheses_from_boxes(read_boxes3d(args.tracks), mode, intrinsics, plane)
        rows = [
            {"setting": setting.value, **evaluate_sequence(gt, hypotheses, mode, setting, self.config.metrics).as_row()}
            for setting in TaskSetting
        ]
        frame = write_reports(rows, args.out_csv, args.out_json)
        self._print_report(frame, f"Метрики: {args.tracks.name}")

    def _cmd_synth(self, args: argparse.Namespace) -> None:
        scenario = load_scenario(args.scenario) if args.scenario else default_scenario(seed=args.seed)
        with self.console.status("[bold]Рендер карт глубины...[/bold]"):
            sequence = render_scenario(scenario)
        sources_3d = complementary_presets(
            args.sources, block=args.block, miss_probability=args.miss,
            fp_rate=args.fp_rate, high_fp_rate=args.high_fp_rate, seed=args.seed,
        )
        sources_2d = [
            DegraderConfig(miss_probability=args.miss, noise_px=2.0, seed=args.seed * 1009 + 500 + k,
                           source_id=f"det{k + 1}")
            for k in range(args.detectors)
        ]
        written = write_bundle(sequence, args.out, sources_3d, sources_2d)
        self.console.print(
            f"[green]✓[/green] Кадров: {len(sequence.frames)}, агентов: {len(scenario.agents)}, "
            f"артефактов: {len(written)} -> {args.out}"
        )

    def _cmd_convert(self, args: argparse.Namespace) -> None:
        records = convert_scalabel(args.input, camera_view=args.camera_view)
        write_annotations(records, args.out)
        self.console.print(f"[green]✓[/green] Объектов разметки: {len(records)} -> {args.out}")

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Разбирает аргументы и выполняет подкоманду.

        Returns:
            int: Код возврата (0 - успех)
        """
        args = self.parser.parse_args(argv)
        handlers = {
            "pipeline": self._cmd_pipeline,
            "sweep": self._cmd_sweep,
            "calibrate": self._cmd_calibrate,
            "lift": self._cmd_lift,
            "track3d": self._cmd_track3d,
            "fuse": self._cmd_fuse,
            "eval": self._cmd_eval,
            "synth": self._cmd_synth,
            "convert-annotations": self._cmd_convert,
        }
        try:
            handlers[args.command](args)
        except _USER_ERRORS as e:
            self._print_error(e)
            logger.debug("Ошибка выполнения команды", exc_info=True)
            return 1
        except KeyboardInterrupt:
            self.console.print("\n[yellow]Прервано пользователем[/yellow]")
            return 130
        return 0


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Запускает CLI интерфейс."""
    if sys.platform == "win32":
        try:
            sys.stdout.reconfigure(encoding="utf-8")
        except (AttributeError, TypeError):
            pass
    return CLI().run(argv)
