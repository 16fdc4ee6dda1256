# plots.py
"""SVG-графики через неинтерактивный бэкенд matplotlib.

Соль хеша и дата в метаданных зафиксированы: одинаковые данные дают
побайтно одинаковые файлы.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

plt.rcParams["svg.hashsalt"] = "maxop"
plt.rcParams["svg.fonttype"] = "path"
plt.rcParams["figure.figsize"] = (6.0, 3.5)
plt.rcParams["axes.grid"] = True
plt.rcParams["grid.alpha"] = 0.3


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"wrote {path}")
    return path


def profile_plot(path: PathLike, grid: np.ndarray, u: np.ndarray, ustar: np.ndarray, title: str = "") -> Path:
    """``|u|`` и ``u*`` на сетке."""
    fig, ax = plt.subplots()
    ax.plot(grid, u, label="|u|", lw=1.0)
    ax.plot(grid, ustar, label="u*", lw=1.2)
    ax.set_xlabel("x")
    ax.set_title(title)
    ax.legend()
    return _save(fig, path)


def kernel_plot(path: PathLike, xs: np.ndarray, ys: np.ndarray, title: str = "") -> Path:
    fig, ax = plt.subplots()
    ax.plot(xs, ys, lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel("φ(x)")
    ax.set_title(title)
    return _save(fig, path)


def convergence_plot(
    path: PathLike,
    series: Dict[str, Sequence[float]],
    indices: Sequence[int],
    title: str = "",
    ylabel: Optional[str] = None,
) -> Path:
    """Кривые в логарифмическом масштабе, по одной на метку, против ``j``."""
    fig, ax = plt.subplots()
    for label in sorted(series):
        ys = np.asarray(series[label], dtype=float)
        # nonpositive values cannot sit on a log axis
        ys = np.where(ys > 0, ys, np.nan)
        ax.loglog(indices, ys, marker="o", lw=1.0, label=label)
    ax.set_xlabel("j")
    if ylabel:
        ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    return _save(fig, path)
