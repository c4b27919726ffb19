"""
Синтетические сценарии: камера над платформой и агенты-боксы,
движущиеся с постоянной скоростью в системе плоскости.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ..geometry import CameraIntrinsics, GeometryError, GroundPlane, plane_from_pose
from ..lifting import BBox3D, ClassLabel
from ..fusion import DangerSide, SafetyLine
from ..constants import Sources


logger = logging.getLogger(__name__)


class SynthError(Exception):
    """Базовое исключение для синтетических данных."""
    pass


class AgentOutsideFrustum(SynthError):
    """Живой агент выходит из поля зрения камеры."""
    pass


@dataclass(frozen=True)
class Agent:
    """
    Агент сценария.

    Attributes:
        agent_id: Идентификатор (единый для всей последовательности)
        start: Центр следа (x, y) на плоскости в кадре spawn_frame
        velocity: Скорость (vx, vy), м/с
        extent: (ширина, высота, глубина), м
        spawn_frame: Первый кадр
        despawn_frame: Последний кадр включительно (None - до конца)
        class_label: Класс
    """
    agent_id: int
    start: Tuple[float, float]
    velocity: Tuple[float, float] = (0.0, 0.0)
    extent: Tuple[float, float, float] = (0.5, 1.7, 0.4)
    spawn_frame: int = 1
    despawn_frame: Optional[int] = None
    class_label: ClassLabel = ClassLabel.PERSON

    def alive(self, frame: int) -> bool:
        return frame >= self.spawn_frame and (self.despawn_frame is None or frame <= self.despawn_frame)

    def position(self, frame: int, frame_rate: float) -> np.ndarray:
        elapsed = (frame - self.spawn_frame) / frame_rate
        return np.asarray(self.start, dtype=np.float64) + np.asarray(self.velocity, dtype=np.float64) * elapsed

    def box(self, frame: int, frame_rate: float) -> BBox3D:
        """Истинный 3D-бокс агента в кадре, основание на плоскости."""
        x, y = self.position(frame, frame_rate)
        return BBox3D(
            center=(float(x), float(y), self.extent[1] / 2.0),
            extent=tuple(float(e) for e in self.extent),
            source_id=Sources.GROUND_TRUTH,
            track_id=self.agent_id,
            frame_index=frame,
            class_label=self.class_label,
        )


@dataclass(frozen=True)
class SynthScenario:
    """
    Сценарий синтетической последовательности.

    Attributes:
        intrinsics: Параметры камеры
        camera_height: Высота камеры над платформой (м)
        pitch: Наклон камеры вниз (рад)
        agents: Агенты
        frame_count: Число кадров (кадры 1..frame_count)
        frame_rate: Частота кадров
        rng_seed: Зерно для случайных невалидных пикселей
        invalid_fraction: Доля невалидных пикселей (пропуски стерео)
        safety_line: Линия безопасности в системе плоскости
    """
    intrinsics: CameraIntrinsics
    camera_height: float = 3.0
    pitch: float = 0.35
    agents: Tuple[Agent, ...] = ()
    frame_count: int = 20
    frame_rate: float = 10.0
    rng_seed: int = 0
    invalid_fraction: float = 0.0
    safety_line: Optional[SafetyLine] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        if self.frame_count < 1 or self.frame_rate <= 0:
            raise ValueError("frame_count должен быть >= 1, frame_rate > 0")
        if not 0.0 <= self.invalid_fraction <= 1.0:
            raise ValueError(f"invalid_fraction вне [0, 1]: {self.invalid_fraction}")
        ids = [a.agent_id for a in self.agents]
        if len(ids) != len(set(ids)):
            raise ValueError("Идентификаторы агентов должны быть уникальны")

    @property
    def plane(self) -> GroundPlane:
        """Истинная плоскость платформы."""
        return plane_from_pose(self.camera_height, self.pitch)

    @property
    def frames(self) -> range:
        return range(1, self.frame_count + 1)

    def boxes(self, frame: int):
        """Истинные боксы живых агентов кадра."""
        return [a.box(frame, self.frame_rate) for a in self.agents if a.alive(frame)]


def default_intrinsics() -> CameraIntrinsics:
    return CameraIntrinsics(fx=300.0, fy=300.0, cx=160.0, cy=120.0, width=320, height=240)


def default_scenario(seed: int = 0, agent_count: int = 4, frame_count: int = 40) -> SynthScenario:
    """
    Типовая сцена: люди идут вдоль полос поперёк платформы.

    Полосы разнесены на 1.6 м, все агенты остаются в поле зрения камеры.
    """
    rng = np.random.default_rng(seed)
    lanes = np.linspace(-2.4, 2.4, max(agent_count, 1))
    agents = []
    for index, lane in enumerate(lanes[:agent_count]):
        spawn = int(rng.integers(1, 6))
        duration = (frame_count - spawn) / 10.0
        speed = float(rng.uniform(0.5, 1.2)) * (1.0 if rng.random() < 0.5 else -1.0)
        travel = speed * duration
        agents.append(Agent(
            agent_id=index + 1,
            start=(float(lane + rng.uniform(-0.2, 0.2)), 8.0 - travel / 2.0),
            velocity=(0.0, speed),
            spawn_frame=spawn,
        ))

    return SynthScenario(
        intrinsics=default_intrinsics(),
        agents=tuple(agents),
        frame_count=frame_count,
        rng_seed=seed,
        safety_line=SafetyLine(points=((-6.0, 5.0), (6.0, 5.0)), danger_side=DangerSide.RIGHT),
    )


def scenario_to_dict(scenario: SynthScenario) -> Dict[str, Any]:
    """JSON-документ сценария."""
    k = scenario.intrinsics
    document: Dict[str, Any] = {
        "camera": {
            "fx": k.fx, "fy": k.fy, "cx": k.cx, "cy": k.cy,
            "width": k.width, "height": k.height,
            "height_m": scenario.camera_height,
            "pitch_rad": scenario.pitch,
        },
        "agents": [
            {
                "id": a.agent_id,
                "start": list(a.start),
                "velocity": list(a.velocity),
                "extent": list(a.extent),
                "spawn_frame": a.spawn_frame,
                "despawn_frame": a.despawn_frame,
                "class": a.class_label.value,
            }
            for a in scenario.agents
        ],
        "frame_count": scenario.frame_count,
        "frame_rate": scenario.frame_rate,
        "rng_seed": scenario.rng_seed,
        "invalid_fraction": scenario.invalid_fraction,
    }
    if scenario.safety_line is not None:
        document["safety_line"] = {
            "points": [list(p) for p in scenario.safety_line.points],
            "danger_side": scenario.safety_line.danger_side.value,
        }
    return document


def dump_scenario(scenario: SynthScenario, path: Union[str, Path]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scenario_to_dict(scenario), f, indent=2, ensure_ascii=False)
        f.write("\n")


def scenario_from_dict(document: Dict[str, Any]) -> SynthScenario:
    """
    Сценарий из JSON-документа.

    Raises:
        SynthError: Некорректный документ
    """
    try:
        camera = document["camera"]
        intrinsics = CameraIntrinsics(
            fx=float(camera["fx"]), fy=float(camera["fy"]),
            cx=float(camera["cx"]), cy=float(camera["cy"]),
            width=int(camera["width"]), height=int(camera["height"]),
        )
        agents = tuple(
            Agent(
                agent_id=int(a["id"]),
                start=tuple(float(v) for v in a["start"]),
                velocity=tuple(float(v) for v in a.get("velocity", (0.0, 0.0))),
                extent=tuple(float(v) for v in a.get("extent", (0.5, 1.7, 0.4))),
                spawn_frame=int(a.get("spawn_frame", 1)),
                despawn_frame=a.get("despawn_frame"),
                class_label=ClassLabel(a.get("class", ClassLabel.PERSON.value)),
            )
            for a in document.get("agents", [])
        )
        line = document.get("safety_line")
        safety_line = (
            SafetyLine(points=tuple(tuple(p) for p in line["points"]), danger_side=line.get("danger_side", "left"))
            if line else None
        )
        return SynthScenario(
            intrinsics=intrinsics,
            camera_height=float(camera.get("height_m", 3.0)),
            pitch=float(camera.get("pitch_rad", 0.35)),
            agents=agents,
            frame_count=int(document.get("frame_count", 20)),
            frame_rate=float(document.get("frame_rate", 10.0)),
            rng_seed=int(document.get("rng_seed", 0)),
            invalid_fraction=float(document.get("invalid_fraction", 0.0)),
            safety_line=safety_line,
        )
    except (KeyError, TypeError, ValueError, GeometryError) as e:
        raise SynthError(f"Некорректный сценарий: {e}") from e


def load_scenario(path: Union[str, Path]) -> SynthScenario:
    """
    Читает сценарий из JSON-файла.

    Raises:
        SynthError: Файл не читается или документ некорректен
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SynthError(f"Не удалось прочитать сценарий {path}: {e}") from e
    return scenario_from_dict(document)
