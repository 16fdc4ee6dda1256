# sequences.py
"""Sequences ``u_j → u`` in ``W^{1,1}`` for the continuity experiments."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from ..errors import SequenceError
from ..funcmodel import (
    PiecewiseLinearFn,
    add,
    norm_sup,
    norm_w11,
    scale,
    subtract,
    tent,
    translate,
    zero,
)

logger = logging.getLogger(__name__)

MODES = ("additive", "translate", "jitter")
DEFAULT_INDICES = (1, 2, 4, 8, 16, 32, 64)


def shifted_tent(u: PiecewiseLinearFn) -> PiecewiseLinearFn:
    """A tent over the right half of ``supp u``, as tall as ``u``."""
    lo, hi = u.support
    height = norm_sup(u) or 1.0
    width = 0.25 * (hi - lo)
    return tent(center=lo + 0.75 * (hi - lo), half_width=width, height=height)


def jittered(u: PiecewiseLinearFn, xi: np.ndarray, j: int) -> PiecewiseLinearFn:
    return PiecewiseLinearFn(u.breakpoints + xi / j, u.values)


@dataclass(frozen=True, eq=False)
class ContinuitySequence:
    """``u_j`` built from ``u`` by one of three modes.

    * ``additive``:  ``u + g/j``
    * ``translate``: ``u(· − 1/j)``
    * ``jitter``:    breakpoints moved by ``ξ/j`` with seeded
      ``|ξ| ≤ min gap / 3``

    ``∥u_j − u∥_{1,1}`` must decrease along the indices; otherwise
    :class:`SequenceError` is raised at construction.
    """

    base: PiecewiseLinearFn
    perturbation: Optional[PiecewiseLinearFn] = None
    indices: Tuple[int, ...] = DEFAULT_INDICES
    mode: str = "additive"
    seed: int = 0
    members: Dict[int, PiecewiseLinearFn] = field(init=False, repr=False)
    distances: Dict[int, float] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise SequenceError(f"unknown mode {self.mode!r}")
        idx = tuple(int(j) for j in self.indices)
        if not idx or any(j < 1 for j in idx) or any(b <= a for a, b in zip(idx, idx[1:])):
            raise SequenceError("indices must be positive and strictly increasing")
        object.__setattr__(self, "indices", idx)

        g = self.perturbation
        if self.mode == "additive" and g is None:
            g = shifted_tent(self.base) if not self.base.is_zero() else zero()
            object.__setattr__(self, "perturbation", g)

        members: Dict[int, PiecewiseLinearFn] = {}
        if self.mode == "jitter":
            gaps = np.diff(self.base.breakpoints)
            bound = float(np.min(gaps)) / 3.0
            xi = np.random.default_rng(self.seed).uniform(-bound, bound, size=self.base.breakpoints.size)
        for j in idx:
            if self.mode == "additive":
                members[j] = add(self.base, scale(g, 1.0 / j))
            elif self.mode == "translate":
                members[j] = translate(self.base, 1.0 / j)
            else:
                members[j] = jittered(self.base, xi, j)
        distances = {j: norm_w11(subtract(members[j], self.base)) for j in idx}
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "distances", distances)

        d = [distances[j] for j in idx]
        scale_ = max(d[0], 1e-300)
        if any(b > a + 1e-12 * scale_ for a, b in zip(d, d[1:])):
            raise SequenceError(f"W^(1,1) distances do not decrease: {d}")
        if len(d) > 1 and d[0] > 0 and not d[-1] < d[0]:
            raise SequenceError("W^(1,1) distance does not shrink along the indices")
        logger.debug(f"ContinuitySequence({self.mode}): distances {d[0]:.4g} -> {d[-1]:.4g}")

    def __iter__(self) -> Iterator[Tuple[int, PiecewiseLinearFn]]:
        return ((j, self.members[j]) for j in self.indices)

    def __getitem__(self, j: int) -> PiecewiseLinearFn:
        return self.members[j]

    def __len__(self) -> int:
        return len(self.indices)

    def distance(self, j: int) -> float:
        """``∥u_j − u∥_{1,1}``."""
        return self.distances[j]

    @property
    def last(self) -> int:
        return self.indices[-1]

    def final(self) -> "ContinuitySequence":
        """The same sequence cut down to its last index."""
        return ContinuitySequence(self.base, self.perturbation, (self.last,), self.mode, self.seed)

    @classmethod
    def constant(cls, u: PiecewiseLinearFn, indices: Sequence[int] = DEFAULT_INDICES) -> "ContinuitySequence":
        """``u_j = u`` for every index (additive mode with ``g = 0``)."""
        lo, hi = u.support
        return cls(u, zero(lo, hi), tuple(indices), "additive")
