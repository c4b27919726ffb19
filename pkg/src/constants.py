"""
Централизованные константы для fusemot.

Все magic numbers и фиксированные значения собраны здесь
для удобства настройки и поддержки.
"""

from typing import FrozenSet, Tuple


class Units:
    """Единицы измерения."""

    MM_PER_M = 1000.0  # Глубина в файлах хранится в миллиметрах
    MAX_DEPTH_MM = 65535  # Максимум 16-битного PGM (~65 м)


class Tolerances:
    """Численные допуски."""

    UNIT_NORMAL = 1e-9  # |n| = 1
    ON_PLANE = 1e-6  # z точки на плоскости
    PSD_EIGENVALUE = -1e-9  # минимальное собственное число ковариации
    DEGENERATE_SINGULAR = 1e-9  # вырожденность облака точек


class DepthLift:
    """Подъём 2D-боксов в 3D."""

    # Нижняя полоса бокса, считающаяся "следом" на платформе
    FOOT_STRIP_FRACTION = 0.1
    # Порог маски "проходимой" поверхности (число независимых детекций)
    WALKABLE_THRESHOLD = 3


class Occlusion:
    """Уровни перекрытия в разметке датасета (%)."""

    LEVELS: Tuple[int, ...] = (0, 25, 50, 75, 100)
    # PEDS: люди с видимостью не менее 25% (перекрытие строго меньше 75%)
    PEDS_MAX_EXCLUSIVE = 75


class Sources:
    """Идентификаторы источников треков."""

    OCCUPANCY_3D = "occupancy3d"
    FUSED = "fused"
    GROUND_TRUTH = "gt"


class CameraViews:
    """Камеры стереоустановки на поезде."""

    LEFT_RIG = "left_rig"
    RIGHT_RIG = "right_rig"
    ALL: FrozenSet[str] = frozenset({LEFT_RIG, RIGHT_RIG})


class Limits:
    """Лимиты."""

    MAX_SOURCES = 16  # 2^16 - 1 комбинаций - верхняя граница перебора
    MAX_SPLIT_DEPTH = 4  # глубина рекурсивного разбиения кластеров


class Formats:
    """Версии и имена файлов артефактов."""

    GRAPH_SCHEMA_VERSION = 1
    ANNOTATION_SCHEMA_VERSION = 1

    # Имена артефактов внутри директории узла
    CALIBRATION = "calibration.json"
    DEPTH_DIR = "depth"
    ANNOTATIONS = "annotations.json"
    PLANE = "plane.json"
    DETECTIONS = "detections.txt"
    SOURCES_DIR = "sources"
    TRACKS = "tracks.trk"
    FUSED = "fused.trk"
    GT_TRACKS = "gt.trk"
    METRICS_JSON = "metrics.json"
    METRICS_CSV = "metrics.csv"
    SAFETY_REPORT = "safety.json"
    CACHE_META = "meta.json"


class MetricColumns:
    """Колонки отчёта в порядке таблицы метрик."""

    ORDER: Tuple[str, ...] = (
        "IDF1", "IDP", "IDR", "Rcll", "Prcn",
        "GT", "MT", "PT", "ML",
        "FP", "FN", "IDs", "FM",
        "MOTA", "MOTP",
    )
