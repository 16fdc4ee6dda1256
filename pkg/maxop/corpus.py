# corpus.py
"""Детерминированный корпус тестовых функций с компактным носителем."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from .funcmodel import PiecewiseLinearFn, norm_w11, random_pl, sawtooth, scale, steps, tent

logger = logging.getLogger(__name__)

KINDS = ("tent", "sawtooth", "steps", "random_pl")


@dataclass(frozen=True)
class CorpusEntry:
    """Элемент корпуса вместе с параметрами генератора."""

    fid: str
    kind: str
    params: Dict[str, Any]
    fn: PiecewiseLinearFn

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.fid, "type": self.kind, "params": self.params, **self.fn.to_dict()}


def _draw(kind: str, rng: np.random.Generator) -> tuple[Dict[str, Any], PiecewiseLinearFn]:
    if kind == "tent":
        params = {
            "center": float(rng.uniform(-1.0, 1.0)),
            "half_width": float(rng.uniform(0.3, 1.5)),
            "height": 1.0,
        }
        return params, tent(**params)
    if kind == "sawtooth":
        params = {
            "teeth": int(rng.integers(2, 6)),
            "width": float(rng.uniform(0.3, 1.0)),
            "height": 1.0,
            "start": float(rng.uniform(-2.0, 0.0)),
            "signed": bool(rng.integers(0, 2)),
        }
        return params, sawtooth(**params)
    if kind == "steps":
        n = int(rng.integers(2, 5))
        params = {
            "levels": [float(x) for x in rng.uniform(0.2, 1.0, size=n)],
            "width": float(rng.uniform(0.2, 0.8)),
            "ramp": float(rng.uniform(0.1, 0.4)),
            "start": float(rng.uniform(-2.0, -0.5)),
        }
        return params, steps(**params)
    params = {"n_breaks": int(rng.integers(5, 12)), "span": float(rng.uniform(1.0, 3.0)), "amplitude": 1.0}
    return params, random_pl(rng=rng, **params)


def generate_corpus(seed: int = 7, n: int = 20) -> List[CorpusEntry]:
    """``n`` функций по кругу из генераторов, нормированных на ``∥·∥_{1,1} = 1``.

    Элемент 1 всегда знакопеременная пила, чтобы работал ``abs_part``.
    """
    if n < 1:
        raise ValueError("corpus size must be >= 1")
    rng = np.random.default_rng(seed)
    out: List[CorpusEntry] = []
    for i in range(n):
        kind = KINDS[i % len(KINDS)]
        params, f = _draw(kind, rng)
        if i == 1:
            params["signed"] = True
            f = sawtooth(**params)
        norm = norm_w11(f)
        if norm == 0.0:
            raise ValueError(f"generator {kind} produced the zero function")
        out.append(CorpusEntry(fid=f"f{i:02d}-{kind}", kind=kind, params=params, fn=scale(f, 1.0 / norm)))
    logger.debug(f"generate_corpus: {n} functions (seed={seed})")
    return out
