"""
Конфигурация приложения.

Модуль содержит настройки калибровки, трекинга, фьюжна, метрик
и пайплайна, загружаемые из переменных окружения.
"""

import os
from pathlib import Path
from typing import Optional, Tuple
from dataclasses import dataclass, field
from dotenv import load_dotenv

from .constants import DepthLift

# Загружаем переменные окружения из .env файла
load_dotenv()


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


def _env_bool(name: str, default: bool) -> bool:
    return os.getenv(name, "true" if default else "false").lower() == "true"


@dataclass
class PlaneFitConfig:
    """Конфигурация автокалибровки плоскости платформы."""

    # Итерации RANSAC
    ransac_iterations: int = 1000

    # Порог инлаера: расстояние до плоскости (м). Типичный шум стерео на платформе
    inlier_threshold: float = 0.02

    # Доля инлаеров ниже этой - сцена калибровки неудачная
    min_inlier_fraction: float = 0.3

    # Априорные знания о монтаже камеры (м)
    prior_mount_height_range: Tuple[float, float] = (2.0, 5.0)
    prior_max_platform_width: float = 10.0

    # Близость к поезду: максимальное расстояние от проекции камеры
    # до ближайшей точки платформы (м). None - ограничение выключено
    prior_train_clearance: Optional[float] = None

    rng_seed: int = 0

    # Маска "проходимой" поверхности
    walkable_threshold: int = DepthLift.WALKABLE_THRESHOLD
    foot_strip_fraction: float = DepthLift.FOOT_STRIP_FRACTION
    use_walkable_mask: bool = True

    # Шаг прореживания пикселей при сборе точек
    point_stride: int = 4

    def __post_init__(self) -> None:
        if self.ransac_iterations < 1:
            raise ValueError("ransac_iterations должен быть >= 1")
        if self.inlier_threshold <= 0:
            raise ValueError("inlier_threshold должен быть > 0")
        if not 0.0 <= self.min_inlier_fraction <= 1.0:
            raise ValueError("min_inlier_fraction вне [0, 1]")
        low, high = self.prior_mount_height_range
        if low > high:
            raise ValueError(f"Некорректный диапазон высоты камеры: {low} > {high}")
        if self.point_stride < 1:
            raise ValueError("point_stride должен быть >= 1")


@dataclass
class GridConfig:
    """Конфигурация карты занятости на плоскости."""

    # Размер ячейки (м) - разрешение масштаба человека
    cell_size: float = 0.1

    # Границы карты в координатах плоскости (м)
    x_range: Tuple[float, float] = (-6.0, 6.0)
    y_range: Tuple[float, float] = (0.0, 20.0)

    # Высотный фильтр: отсекает пол и конструкции над головой
    min_height: float = 0.1
    max_height: float = 2.2

    def __post_init__(self) -> None:
        if self.cell_size <= 0:
            raise ValueError("cell_size должен быть > 0")
        if self.x_range[0] >= self.x_range[1] or self.y_range[0] >= self.y_range[1]:
            raise ValueError("Пустые границы карты занятости")


@dataclass
class ClusterConfig:
    """Конфигурация кластеризации карты занятости."""

    # Минимальное свидетельство в ячейке (площадь видимой поверхности / площадь ячейки)
    evidence_threshold: float = 2.0

    # Минимальная масса кластера
    min_mass: float = 10.0

    # Априорная ширина человека (м)
    person_extent_prior: float = 0.6

    # Сдвигать центроид на половину глубины от камеры (видна только передняя поверхность)
    surface_compensation: bool = True

    def __post_init__(self) -> None:
        if self.person_extent_prior <= 0:
            raise ValueError("person_extent_prior должен быть > 0")


@dataclass
class LifecycleConfig:
    """Конфигурация жизненного цикла треков 3D-трекера."""

    # Гейт ассоциации (м)
    gate: float = 1.0

    confirm_hits: int = 3
    max_misses: int = 5

    # Сколько кадров подряд выдавать подтверждённый трек без измерения
    max_coast_frames: int = 0

    # Шум процесса (дисперсия ускорения, (м/с^2)^2)
    process_noise: float = 1.0

    # Шум измерения (дисперсия позиции, м^2)
    measurement_noise: float = 0.01

    # Начальная неопределённость скорости ((м/с)^2)
    initial_velocity_variance: float = 1.0

    # Частота кадров, если нет временных меток
    frame_rate: float = 10.0

    def __post_init__(self) -> None:
        if self.frame_rate <= 0:
            raise ValueError("frame_rate должен быть > 0")
        if self.confirm_hits < 1 or self.max_misses < 1:
            raise ValueError("confirm_hits и max_misses должны быть >= 1")
        if not self.gate > 0:
            raise ValueError(f"gate должен быть > 0, получено {self.gate}")
        if self.process_noise < 0 or self.measurement_noise <= 0 or self.initial_velocity_variance < 0:
            raise ValueError("Дисперсии шумов не могут быть отрицательными, шум измерения > 0")


@dataclass
class FusionConfig:
    """Конфигурация фьюжна треклетов."""

    iou_threshold: float = 0.3
    ioe_threshold: float = 0.7

    # Треклеты без обновлений дольше этого числа кадров выводятся из оборота
    staleness_limit: int = 15

    def __post_init__(self) -> None:
        for name in ("iou_threshold", "ioe_threshold"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} должен быть в (0, 1], получено {value}")
        if self.staleness_limit < 0:
            raise ValueError("staleness_limit должен быть >= 0")


@dataclass
class MetricsConfig:
    """Конфигурация оценки MOT."""

    # Порог совпадения: IoU в режиме изображения, расстояние (м) на плоскости
    iou_threshold: float = 0.5
    distance_threshold: float = 1.0

    # Границы MT/ML по доле времени жизни
    mostly_tracked_ratio: float = 0.8
    mostly_lost_ratio: float = 0.2


@dataclass
class PipelineConfig:
    """Конфигурация исполнения графа узлов."""

    cache_dir: Path = field(default_factory=lambda: Path("./.fusemot_cache"))

    # Параллельное исполнение независимых узлов (1 - последовательно)
    max_workers: int = 1


@dataclass
class Config:
    """Основная конфигурация приложения."""

    plane_fit: PlaneFitConfig = field(default_factory=PlaneFitConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    lifecycle: LifecycleConfig = field(default_factory=LifecycleConfig)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)

    # Уровень логирования
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Config":
        """
        Создаёт конфигурацию из переменных окружения.

        Returns:
            Config: Объект конфигурации с настройками из .env
        """
        plane_fit = PlaneFitConfig(
            ransac_iterations=_env_int("FUSEMOT_RANSAC_ITERATIONS", 1000),
            inlier_threshold=_env_float("FUSEMOT_INLIER_THRESHOLD", 0.02),
            min_inlier_fraction=_env_float("FUSEMOT_MIN_INLIER_FRACTION", 0.3),
            prior_mount_height_range=(
                _env_float("FUSEMOT_MOUNT_HEIGHT_MIN", 2.0),
                _env_float("FUSEMOT_MOUNT_HEIGHT_MAX", 5.0),
            ),
            prior_max_platform_width=_env_float("FUSEMOT_MAX_PLATFORM_WIDTH", 10.0),
            rng_seed=_env_int("FUSEMOT_RNG_SEED", 0),
            use_walkable_mask=_env_bool("FUSEMOT_USE_WALKABLE_MASK", True),
        )

        grid = GridConfig(
            cell_size=_env_float("FUSEMOT_CELL_SIZE", 0.1),
        )

        lifecycle = LifecycleConfig(
            gate=_env_float("FUSEMOT_TRACK_GATE", 1.0),
            confirm_hits=_env_int("FUSEMOT_CONFIRM_HITS", 3),
            max_misses=_env_int("FUSEMOT_MAX_MISSES", 5),
            frame_rate=_env_float("FUSEMOT_FRAME_RATE", 10.0),
        )

        fusion = FusionConfig(
            iou_threshold=_env_float("FUSEMOT_IOU_THRESHOLD", 0.3),
            ioe_threshold=_env_float("FUSEMOT_IOE_THRESHOLD", 0.7),
            staleness_limit=_env_int("FUSEMOT_STALENESS_LIMIT", 15),
        )

        pipeline = PipelineConfig(
            cache_dir=Path(os.getenv("FUSEMOT_CACHE_DIR", "./.fusemot_cache")),
            max_workers=_env_int("FUSEMOT_MAX_WORKERS", 1),
        )

        return cls(
            plane_fit=plane_fit,
            grid=grid,
            lifecycle=lifecycle,
            fusion=fusion,
            pipeline=pipeline,
            log_level=os.getenv("FUSEMOT_LOG_LEVEL", "WARNING"),
        )


# Глобальный экземпляр конфигурации
_config: Config | None = None


def get_config() -> Config:
    """
    Получает глобальный экземпляр конфигурации.

    Returns:
        Config: Объект конфигурации
    """
    global _config
    if _config is None:
        _config = Config.from_env()
    return _config


def reset_config() -> None:
    """Сбрасывает глобальную конфигурацию (для тестов)."""
    global _config
    _config = None
