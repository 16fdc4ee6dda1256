"""
Вспомогательные функции для тестов
"""

from typing import Callable, Optional

import numpy as np

from maxop.funcmodel import PiecewiseLinearFn, abs_part
from maxop.kernels import KernelSpec
from maxop.scalespace import MaximalProfile


def fake_profile(
    u: PiecewiseLinearFn,
    grid: np.ndarray,
    kernel: KernelSpec,
    lift: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    err: float = 1e-6,
) -> MaximalProfile:
    """
    Профиль с ustar = |u| + lift(x) без поиска по масштабам

    Args:
        u: Функция
        grid: Сетка
        kernel: Ядро, записываемое в профиль
        lift: Добавка к |u| (None: ноль)
        err: Заявленная погрешность

    Returns:
        MaximalProfile
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(abs_part(u)(grid), dtype=float)
    if lift is not None:
        values = values + lift(grid)
    return MaximalProfile(grid, values, np.zeros(grid.size), err, kernel)


def inject_bump(profile: MaximalProfile, x: float, height: float) -> MaximalProfile:
    """Поднимает значение профиля в ближайшей к x точке сетки"""
    i = int(np.argmin(np.abs(profile.grid - x)))
    values = np.array(profile.ustar)
    values[i] += height
    return profile.with_values(values)


def far_field_poisson(x: float, l1: float) -> float:
    """Асимптотика u*(x) ≈ ∥u∥₁ / (2π|x|) для ядра Пуассона"""
    return l1 / (2.0 * np.pi * abs(x))
