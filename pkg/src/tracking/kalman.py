"""
Фильтр Калмана с моделью постоянной скорости на плоскости платформы.

Состояние трека: (x, y, vx, vy) в системе плоскости.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np
from filterpy.common import Q_discrete_white_noise
from filterpy.kalman import predict, update

from ..config import LifecycleConfig
from ..constants import Tolerances


logger = logging.getLogger(__name__)

_H = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
])


class TrackingError(Exception):
    """Базовое исключение для 3D-трекинга."""
    pass


class InvalidTrackState(TrackingError):
    """Ковариация не симметрична или не положительно полуопределена."""
    pass


class InvalidTransition(TrackingError):
    """Недопустимый переход статуса трека."""
    pass


class TrackStatus(Enum):
    """
    Статус трека.

    Values:
        TENTATIVE: Новый трек, ещё не подтверждён
        CONFIRMED: Подтверждён, выдаётся на выход
        DELETED: Удалён после серии пропусков
    """
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    DELETED = "deleted"


# Статусы только продвигаются вперёд
_ALLOWED_TRANSITIONS = {
    TrackStatus.TENTATIVE: {TrackStatus.TENTATIVE, TrackStatus.CONFIRMED, TrackStatus.DELETED},
    TrackStatus.CONFIRMED: {TrackStatus.CONFIRMED, TrackStatus.DELETED},
    TrackStatus.DELETED: {TrackStatus.DELETED},
}


@dataclass(frozen=True, eq=False)
class TrackState:
    """
    Состояние одного трека.

    Attributes:
        mean: Вектор состояния (x, y, vx, vy)
        covariance: Ковариация 4x4
        track_id: Идентификатор трека
        age_frames: Возраст в кадрах
        hits: Число сопоставленных измерений
        misses: Пропуски подряд
        status: Статус жизненного цикла
        extent: (ширина, высота, глубина) последнего сопоставленного кластера
    """
    mean: np.ndarray
    covariance: np.ndarray
    track_id: int
    age_frames: int = 0
    hits: int = 1
    misses: int = 0
    status: TrackStatus = TrackStatus.TENTATIVE
    extent: Tuple[float, float, float] = (0.6, 1.7, 0.6)

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64).reshape(4)
        cov = np.asarray(self.covariance, dtype=np.float64).reshape(4, 4)
        if not np.allclose(cov, cov.T, atol=1e-9):
            raise InvalidTrackState(f"Ковариация трека {self.track_id} не симметрична")
        if np.linalg.eigvalsh(cov).min() < Tolerances.PSD_EIGENVALUE * max(1.0, np.abs(cov).max()):
            raise InvalidTrackState(f"Ковариация трека {self.track_id} не PSD")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def position(self) -> np.ndarray:
        return self.mean[:2].copy()

    @property
    def velocity(self) -> np.ndarray:
        return self.mean[2:].copy()

    def with_status(self, status: TrackStatus) -> "TrackState":
        """Копия с новым статусом; переходы назад запрещены."""
        if status not in _ALLOWED_TRANSITIONS[self.status]:
            raise InvalidTransition(f"Трек {self.track_id}: {self.status.value} -> {status.value}")
        return replace(self, status=status)


def initiate_track(
    track_id: int,
    position: Sequence[float],
    cfg: LifecycleConfig,
    extent: Tuple[float, float, float] = (0.6, 1.7, 0.6),
) -> TrackState:
    """Новый трек в позиции измерения с нулевой скоростью."""
    mean = np.array([position[0], position[1], 0.0, 0.0], dtype=np.float64)
    covariance = np.diag([
        cfg.measurement_noise,
        cfg.measurement_noise,
        cfg.initial_velocity_variance,
        cfg.initial_velocity_variance,
    ])
    status = TrackStatus.CONFIRMED if cfg.confirm_hits <= 1 else TrackStatus.TENTATIVE
    return TrackState(mean=mean, covariance=covariance, track_id=track_id, status=status, extent=extent)


def transition_matrix(dt: float) -> np.ndarray:
    F = np.eye(4)
    F[0, 2] = dt
    F[1, 3] = dt
    return F


def _symmetrize(P: np.ndarray) -> np.ndarray:
    return (P + P.T) / 2.0


def kalman_predict(track: TrackState, dt: float, process_noise: float) -> TrackState:
    """
    Прогноз на dt секунд.

    Шум процесса - дискретный белый шум ускорения с дисперсией process_noise.
    """
    if not dt > 0:
        raise ValueError(f"dt должен быть > 0, получено {dt}")
    if process_noise < 0:
        raise ValueError(f"process_noise должен быть >= 0, получено {process_noise}")

    Q = Q_discrete_white_noise(dim=2, dt=dt, var=process_noise, block_size=2, order_by_dim=False)
    x, P = predict(track.mean, track.covariance, F=transition_matrix(dt), Q=Q)
    return replace(track, mean=np.asarray(x).reshape(4), covariance=_symmetrize(P))


def kalman_update(
    track: TrackState,
    measurement: Sequence[float],
    measurement_noise: Union[float, np.ndarray],
) -> TrackState:
    """Коррекция по измерению позиции (x, y)."""
    z = np.asarray(measurement, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(z)):
        raise ValueError(f"Измерение должно быть конечным: {z}")

    R = np.asarray(measurement_noise, dtype=np.float64)
    if R.ndim == 0:
        R = np.eye(2) * float(R)

    x, P = update(track.mean, track.covariance, z, R, _H)
    return replace(track, mean=np.asarray(x).reshape(4), covariance=_symmetrize(P))
