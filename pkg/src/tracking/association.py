"""
Оптимальное сопоставление треков и измерений (венгерский алгоритм).
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass
class Assignment:
    """
    Результат сопоставления.

    Attributes:
        matches: Пары (строка, столбец)
        unmatched_rows: Строки без пары
        unmatched_cols: Столбцы без пары
    """
    matches: List[Tuple[int, int]] = field(default_factory=list)
    unmatched_rows: List[int] = field(default_factory=list)
    unmatched_cols: List[int] = field(default_factory=list)
    total_cost: float = 0.0


def associate_hungarian(cost_matrix: np.ndarray, gate: float = np.inf) -> Assignment:
    """
    Минимальное по стоимости сопоставление с гейтом.

    Элементы с cost > gate или нечисловые запрещены. Среди сопоставлений
    максимального размера выбирается минимальное по суммарной стоимости.

    Args:
        cost_matrix: Матрица стоимостей (строки x столбцы)
        gate: Порог допустимой стоимости

    Returns:
        Assignment: Пары и несопоставленные индексы (по возрастанию)
    """
    cost = np.asarray(cost_matrix, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError(f"Ожидалась 2D-матрица стоимостей, получено {cost.shape}")
    rows, cols = cost.shape

    allowed = np.isfinite(cost) & (cost <= gate)
    if rows == 0 or cols == 0 or not np.any(allowed):
        return Assignment(unmatched_rows=list(range(rows)), unmatched_cols=list(range(cols)))

    # Запрещённая пара дороже любого набора разрешённых
    forbidden = 2.0 * (np.abs(cost[allowed]).sum() + 1.0)
    padded = np.where(allowed, cost, forbidden)
    row_ind, col_ind = linear_sum_assignment(padded)

    matches = [(int(r), int(c)) for r, c in zip(row_ind, col_ind) if allowed[r, c]]
    matched_rows = {r for r, _ in matches}
    matched_cols = {c for _, c in matches}

    return Assignment(
        matches=sorted(matches),
        unmatched_rows=[r for r in range(rows) if r not in matched_rows],
        unmatched_cols=[c for c in range(cols) if c not in matched_cols],
        total_cost=float(sum(cost[r, c] for r, c in matches)),
    )
