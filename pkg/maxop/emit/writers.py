# writers.py
"""Детерминированная запись CSV и JSON.

Числа пишутся с 17 значащими цифрами, строки CSV заканчиваются CRLF.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Записывает таблицу в CSV

    Args:
        path: Путь к файлу (каталоги создаются)
        header: Заголовок
        rows: Строки значений

    Returns:
        Путь к записанному файлу
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
            n += 1
    logger.info(f"wrote {path} ({n} rows)")
    return path


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return fmt(x)
        # 17 значащих цифр восстанавливают любое double
        return float(format(x, ".17g"))
    return obj


def write_json(path: PathLike, payload: Any) -> Path:
    """Записывает payload как JSON с сортированными ключами; NaN и бесконечности становятся строками."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(_plain(payload), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    logger.info(f"wrote {path}")
    return path
