# detachment.py
"""Detachment set ``D = {u* > u}`` and its decomposition by step breakpoints.

``D`` is not decidable from certified samples, so it is thresholded:
``D_δ = {x : u*(x) − |u|(x) > δ}`` with ``δ > profile.err``.  Component
endpoints are located by linear interpolation of ``u* − |u|`` between grid
samples; a component touching the grid boundary is reported as an unbounded
ray.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .funcmodel import PiecewiseLinearFn, StepFunction, abs_part
from .scalespace import MaximalProfile

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


def _encode(x: float) -> Any:
    # JSON has no infinity literal
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _decode(x: Any) -> float:
    return float(x)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint, nonempty open intervals (endpoints may be ``±inf``)."""

    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        ivs = tuple((float(l), float(r)) for l, r in self.intervals)
        for l, r in ivs:
            if not l < r:
                raise ValueError(f"empty interval ({l!r}, {r!r})")
        for (_, r0), (l1, _) in zip(ivs, ivs[1:]):
            if r0 > l1:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", ivs)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def contains(self, x: float) -> bool:
        return any(l < x < r for l, r in self.intervals)

    def clipped(self, lo: float, hi: float) -> "IntervalSet":
        """Intersection with ``(lo, hi)``."""
        out = [(max(l, lo), min(r, hi)) for l, r in self.intervals]
        return IntervalSet(tuple((l, r) for l, r in out if l < r))

    def measure(self, lo: float = -math.inf, hi: float = math.inf) -> float:
        return float(sum(r - l for l, r in self.clipped(lo, hi)))

    def is_subset_of(self, other: "IntervalSet") -> bool:
        return all(any(ol <= l and r <= or_ for ol, or_ in other) for l, r in self)

    def union(self, *others: "IntervalSet") -> "IntervalSet":
        """Union of disjoint pieces; touching intervals stay separate (open sets)."""
        merged = sorted(iv for s in (self, *others) for iv in s)
        return IntervalSet(tuple(merged))

    def complement(self, lo: float, hi: float) -> "IntervalSet":
        """``(lo, hi)`` minus the closure of the set, as open intervals."""
        out: List[Interval] = []
        cursor = lo
        for l, r in self.clipped(lo, hi):
            if l > cursor:
                out.append((cursor, l))
            cursor = max(cursor, r)
        if cursor < hi:
            out.append((cursor, hi))
        return IntervalSet(tuple(out))

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out: List[Interval] = []
        for l0, r0 in self:
            for l1, r1 in other:
                l, r = max(l0, l1), min(r0, r1)
                if l < r:
                    out.append((l, r))
        return IntervalSet(tuple(sorted(out)))

    def to_list(self) -> List[List[Any]]:
        return [[_encode(l), _encode(r)] for l, r in self.intervals]

    @classmethod
    def from_list(cls, rows: Iterable[Sequence[Any]]) -> "IntervalSet":
        return cls(tuple((_decode(l), _decode(r)) for l, r in rows))


EMPTY = IntervalSet()


@dataclass(frozen=True)
class DetachmentDecomposition:
    """``D = D¹ ∪ ⋃ᵢ D²ⁱ`` relative to breakpoints ``a₁ < … < a_{N+1}``.

    ``d1`` collects the components containing at least one breakpoint;
    ``d2[i]`` those inside the gap ``(aᵢ, aᵢ₊₁)`` for ``i = 0 … N+1`` (with
    ``a₀ = −∞`` and ``a_{N+2} = +∞``).
    """

    d1: IntervalSet
    d2: Dict[int, IntervalSet]
    breakpoints: Tuple[float, ...] = field(default=())

    def union(self) -> IntervalSet:
        return self.d1.union(*self.d2.values())

    def d2_components(self) -> List[Tuple[int, Interval]]:
        return [(i, iv) for i in sorted(self.d2) for iv in self.d2[i]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d1": self.d1.to_list(),
            "d2": {str(i): self.d2[i].to_list() for i in sorted(self.d2)},
            "breakpoints": [float(a) for a in self.breakpoints],
        }


def _crossing(g0: float, g1: float, d0: float, d1: float, level: float) -> float:
    """Where the linear interpolant of ``d`` on ``[g0, g1]`` meets ``level``."""
    return g0 + (level - d0) / (d1 - d0) * (g1 - g0)


def detachment_set(profile: MaximalProfile, u: PiecewiseLinearFn, delta: float) -> IntervalSet:
    """Maximal open intervals where ``u* − |u| > δ``."""
    if not delta > profile.err:
        raise ValueError(f"delta={delta!r} must exceed the profile error {profile.err!r}")
    grid = profile.grid
    gap = profile.ustar - np.asarray(abs_part(u)(grid))
    inside = gap > delta
    if not inside.any():
        return EMPTY

    edges = np.diff(inside.astype(np.int8))
    starts = list(np.nonzero(edges == 1)[0] + 1)
    ends = list(np.nonzero(edges == -1)[0])
    if inside[0]:
        starts.insert(0, 0)
    if inside[-1]:
        ends.append(grid.size - 1)

    out: List[Interval] = []
    for i, j in zip(starts, ends):
        if i == 0:
            left = -math.inf
        else:
            left = _crossing(grid[i - 1], grid[i], gap[i - 1], gap[i], delta)
        if j == grid.size - 1:
            right = math.inf
        else:
            right = _crossing(grid[j], grid[j + 1], gap[j], gap[j + 1], delta)
        out.append((float(left), float(right)))

    logger.debug(f"detachment_set: {len(out)} component(s) at delta={delta:.3g}")
    return IntervalSet(tuple(out))


def decompose(D: IntervalSet, v: StepFunction) -> DetachmentDecomposition:
    """Split ``D`` into components containing a breakpoint and per-gap pieces."""
    a = v.breakpoints
    d1: List[Interval] = []
    d2: Dict[int, List[Interval]] = {i: [] for i in range(a.size + 1)}
    for l, r in D:
        # breakpoints ≤ l, and breakpoints < r
        below = int(np.searchsorted(a, l, side="right"))
        before_r = int(np.searchsorted(a, r, side="left"))
        if before_r > below:
            d1.append((l, r))
        else:
            d2[below].append((l, r))
    return DetachmentDecomposition(
        d1=IntervalSet(tuple(d1)),
        d2={i: IntervalSet(tuple(ivs)) for i, ivs in d2.items()},
        breakpoints=tuple(float(x) for x in a),
    )


def grid_span(profile: MaximalProfile) -> Interval:
    return float(profile.grid[0]), float(profile.grid[-1])


def component_of(D: IntervalSet, x: float) -> Optional[Interval]:
    for l, r in D:
        if l < x < r:
            return l, r
    return None
