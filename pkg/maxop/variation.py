# variation.py
"""Partition variation, total variation and the partition transfer.

``Var(w, P) = Σ |w(a_{i+1}) − w(a_i)|`` for a partition ``P = {a_1 < … < a_m}``.
For piecewise-linear ``f`` the total variation ``∫_{[a,b]} |f′|`` is exact
and attained at the breakpoint partition.

:func:`transfer_partition` builds, inside one cell of a coarse partition,
points ``a*_k`` where ``|u|`` takes the values ``u*(a_k)`` of an alternating
partition of the maximal function, so that the two partitions carry the same
inner variation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import BracketError, InconclusiveTransfer, MaxopError
from .funcmodel import PiecewiseLinearFn, abs_part
from .scalespace import MaximalProfile, maximal_at

logger = logging.getLogger(__name__)

INTERIOR_SAMPLES = 2


class CoarseGridError(MaxopError, ValueError):
    """Too few samples to certify the extremal partition."""

    def __init__(self, achieved: float, message: str = ""):
        super().__init__(f"{message or 'grid too coarse'} (achieved variation {achieved!r})")
        self.achieved = achieved


@dataclass(frozen=True, eq=False)
class Partition:
    """Strictly increasing points ``a_1 < … < a_m`` with ``m ≥ 1``."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float).reshape(-1)
        if pts.size < 1:
            raise ValueError("partition needs at least one point")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("partition points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.size)

    def __iter__(self):
        return iter(self.points.tolist())

    @property
    def endpoints(self) -> "Partition":
        return Partition(np.unique([self.points[0], self.points[-1]]))

    def union(self, *others: "Partition") -> "Partition":
        return Partition(np.unique(np.concatenate([self.points, *[o.points for o in others]])))

    def to_list(self) -> List[float]:
        return [float(p) for p in self.points]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Grid samples with linear interpolation in between (clamped outside)."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        g = np.array(self.grid, dtype=float)
        v = np.array(self.values, dtype=float)
        if g.shape != v.shape or g.ndim != 1:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_profile(cls, profile: MaximalProfile) -> "SampledFunction":
        return cls(profile.grid, profile.ustar)

    @classmethod
    def of(cls, fn: Callable, grid: Sequence[float]) -> "SampledFunction":
        g = np.asarray(grid, dtype=float)
        return cls(g, np.asarray(fn(g), dtype=float))

    def __call__(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.grid, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def restrict(self, a: float, b: float) -> "SampledFunction":
        """Samples in ``[a, b]`` plus interpolated values at ``a`` and ``b``."""
        inner = self.grid[(self.grid > a) & (self.grid < b)]
        g = np.concatenate(([a], inner, [b]))
        return SampledFunction(g, self(g))


Evaluable = Union[Callable, SampledFunction, PiecewiseLinearFn]


def _values(w: Evaluable, pts: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(w(pts), dtype=float)
        if vals.shape == pts.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([w(float(p)) for p in pts], dtype=float)


def var_over_partition(w: Evaluable, P: Partition) -> float:
    """``Σ |w(a_{i+1}) − w(a_i)|``."""
    if len(P) < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(_values(w, P.points)))))


def total_variation(f: PiecewiseLinearFn, a: float = -math.inf, b: float = math.inf) -> float:
    """``∫_{[a,b]} |f′|`` exactly (interval clamped to the support)."""
    if a > b:
        raise ValueError("need a <= b")
    lo = np.maximum(f.breakpoints[:-1], a)
    hi = np.minimum(f.breakpoints[1:], b)
    overlap = np.clip(hi - lo, 0.0, None)
    return float(np.sum(np.abs(f.slopes) * overlap))


def sampled_variation(w: SampledFunction) -> float:
    return float(np.sum(np.abs(np.diff(w.values))))


def alternating_points(values: np.ndarray, min_rise: float = 0.0) -> np.ndarray:
    """Indices of the endpoints and the turning points of ``values``.

    A direction change is accepted only once the samples move more than
    ``min_rise`` away from the running extreme.  Plateaus keep their first
    point, except a final plateau, which is represented by the last sample.
    """
    n = values.size
    if n <= 2:
        return np.arange(n)
    picks = [0]
    direction = 0
    cand = 0
    for i in range(1, n):
        if direction == 0:
            if values[i] - values[0] > min_rise:
                direction, cand = 1, i
            elif values[0] - values[i] > min_rise:
                direction, cand = -1, i
        elif direction > 0:
            if values[i] > values[cand]:
                cand = i
            elif values[cand] - values[i] > min_rise:
                picks.append(cand)
                direction, cand = -1, i
        else:
            if values[i] < values[cand]:
                cand = i
            elif values[i] - values[cand] > min_rise:
                picks.append(cand)
                direction, cand = 1, i
    if direction != 0 and cand != n - 1 and values[cand] != values[n - 1]:
        picks.append(cand)
    picks.append(n - 1)
    return np.array(picks)


def extremal_partition(
    w: SampledFunction,
    a: float,
    b: float,
    eps: float,
    min_rise: float = 0.0,
) -> Partition:
    """Alternating extrema of the samples on ``[a, b]`` (endpoints included).

    Raises :class:`CoarseGridError` when fewer than two samples fall inside
    ``(a, b)`` or the partition misses more than ``eps`` of the sampled
    variation.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not a < b:
        raise ValueError("need a < b")
    local = w.restrict(a, b)
    if local.grid.size < INTERIOR_SAMPLES + 2:
        raise CoarseGridError(sampled_variation(local), f"fewer than {INTERIOR_SAMPLES} samples inside [{a}, {b}]")
    idx = alternating_points(local.values, min_rise)
    P = Partition(local.grid[idx])
    achieved = float(np.sum(np.abs(np.diff(local.values[idx]))))
    total = sampled_variation(local)
    if achieved < total - eps:
        raise CoarseGridError(achieved, f"extremal partition misses {total - achieved:.3e}")
    return P


# ---- partition transfer -------------------------------------------------
def _level_root(u: PiecewiseLinearFn, x_from: float, x_to: float, level: float) -> float:
    """First point from ``x_from`` toward ``x_to`` where ``u`` reaches ``level``.

    ``u − level`` must change sign (or vanish) between the two ends.  The
    bracketing linear segment is solved exactly, which is the limit of
    bisection on a piecewise-linear function.
    """
    lo, hi = min(x_from, x_to), max(x_from, x_to)
    inner = u.breakpoints[(u.breakpoints > lo) & (u.breakpoints < hi)]
    xs = np.concatenate(([lo], inner, [hi]))
    if x_from > x_to:
        xs = xs[::-1]
    d = np.asarray(u(xs)) - level
    if d[0] == 0.0:
        return float(xs[0])
    hit = np.nonzero(np.sign(d[1:]) != np.sign(d[0]))[0]
    if hit.size == 0:
        raise ValueError("no sign change")
    j = int(hit[0]) + 1
    if d[j] == 0.0:
        return float(xs[j])
    return float(xs[j - 1] + d[j - 1] / (d[j - 1] - d[j]) * (xs[j] - xs[j - 1]))


def profile_value_fn(u: PiecewiseLinearFn, profile: MaximalProfile) -> Callable[[float], float]:
    """``u*`` from the samples on grid points, else from :func:`maximal_at`."""

    def ustar(x: float) -> float:
        i = profile.index_of(x)
        if i is not None:
            return float(profile.ustar[i])
        return maximal_at(u, profile.kernel, x, tol=profile.err)[0]

    return ustar


def alternating_reduction(
    Pi: Partition,
    cell: Tuple[float, float],
    ustar: Callable[[float], float],
) -> Tuple[np.ndarray, np.ndarray]:
    """Cell endpoints plus the points of ``Pi`` inside, thinned to strict alternation.

    Points where ``u*`` is not a strict extremum against its neighbours lie
    on monotone runs and are dropped; the variation of ``u*`` over the
    partition is unchanged.  Returns ``(points, levels)``.
    """
    left, right = float(cell[0]), float(cell[1])
    if not left < right:
        raise ValueError("empty cell")
    pts = Pi.points[(Pi.points > left) & (Pi.points < right)]
    pts = np.concatenate(([left], pts, [right]))
    levels = np.array([ustar(float(p)) for p in pts])
    if np.all(levels == levels[0]):
        return pts, levels
    keep = alternating_points(levels)
    if keep.size < pts.size:
        logger.debug(f"alternating_reduction: dropped {pts.size - keep.size} point(s) in ({left:.4g}, {right:.4g})")
    return pts[keep], levels[keep]


def transfer_partition(
    u: PiecewiseLinearFn,
    profile: MaximalProfile,
    Pi: Partition,
    cell: Tuple[float, float],
    ustar: Optional[Callable[[float], float]] = None,
) -> Partition:
    """Points ``a*_1 < … < a*_{n−1}`` in the cell with ``|u|(a*_k) = u*(a_k)``.

    ``Pi`` is a partition of ``u*`` on ``[a_{i−1}, a_i]``; the cell endpoints
    are added and the points are thinned by :func:`alternating_reduction`
    with the same ``u*`` evaluations used below.  Local maxima are solved first in
    ``(a_{k−1}, a_{k+1})``; local minima then in ``(a_k, a*_{k+1})``, or in
    ``(a*_{n−2}, a_{n−1})`` for the last one.  For ``n ≤ 2`` the interior
    points are returned unchanged.
    """
    left, right = float(cell[0]), float(cell[1])
    if not left < right:
        raise ValueError("empty cell")
    inside = Pi.points[(Pi.points > left) & (Pi.points < right)]
    if inside.size < 1:
        raise ValueError("cell partition has no interior point")
    if inside.size == 1:
        return Partition(inside)

    a = abs_part(u)
    ustar = ustar or profile_value_fn(u, profile)
    pts, levels = alternating_reduction(Pi, cell, ustar)
    n = pts.size - 1
    if n < 2:
        raise BracketError(0, (left, right), "u* is monotone on the cell")
    interior = Partition(pts[1:-1])
    if n <= 2 or np.all(levels == levels[0]):
        return interior
    margin = 2.0 * profile.err

    star = np.full(pts.size, np.nan)
    star[0], star[-1] = pts[0], pts[-1]
    kinds = []
    for k in range(1, n):
        if levels[k] > max(levels[k - 1], levels[k + 1]):
            kinds.append("max")
        elif levels[k] < min(levels[k - 1], levels[k + 1]):
            kinds.append("min")
        else:
            raise BracketError(k, (float(pts[k - 1]), float(pts[k + 1])), "partition does not alternate")

    for k in range(1, n):
        if kinds[k - 1] != "max":
            continue
        lo, hi = float(pts[k - 1]), float(pts[k + 1])
        level = float(levels[k])
        nodes = np.concatenate(([lo], a.breakpoints[(a.breakpoints > lo) & (a.breakpoints < hi)], [hi]))
        vals = np.asarray(a(nodes))
        top = int(np.argmax(vals))
        if vals[top] < level:
            if level - vals[top] <= margin:
                raise InconclusiveTransfer(k, level - vals[top])
            raise BracketError(k, (lo, hi), f"|u| stays below u*(a_k)={level!r}")
        peak = float(nodes[top])
        if vals[0] <= level:
            star[k] = _level_root(a, peak, lo, level)
        elif vals[-1] <= level:
            star[k] = _level_root(a, peak, hi, level)
        else:
            raise BracketError(k, (lo, hi), "|u| exceeds the level at both ends")

    for k in range(1, n):
        if kinds[k - 1] != "min":
            continue
        level = float(levels[k])
        if k < n - 1:
            lo, hi = float(pts[k]), float(star[k + 1])
            start, stop = lo, hi
        else:
            lo, hi = float(star[k - 1]), float(pts[k])
            start, stop = hi, lo
        below = float(a(start)) - level
        above = float(a(stop)) - level
        if below > 0 or above < 0:
            worst = max(below, -above)
            if worst <= margin:
                raise InconclusiveTransfer(k, worst)
            raise BracketError(k, (lo, hi))
        if above < margin:
            # u*(a_k) < |u|(a*_{k±1}) holds only within the profile error
            raise InconclusiveTransfer(k, above)
        star[k] = _level_root(a, start, stop, level)

    inner = star[1:-1]
    if np.any(np.diff(inner) <= 0):
        raise BracketError(int(np.argmin(np.diff(inner))) + 1, (left, right), "transferred points out of order")
    logger.debug(f"transfer_partition: cell=({left:.4g}, {right:.4g}), n={n}")
    return Partition(inner)


def transfer_identity_gap(
    u: PiecewiseLinearFn,
    Pi_star: Partition,
    Pi_inner: Partition,
    ustar: Callable[[float], float],
) -> Tuple[float, float]:
    """Both sides of ``Var(u, P*) − Var(u, ends*) = Var(u*, P) − Var(u*, ends)``."""
    a = abs_part(u)
    lhs = var_over_partition(a, Pi_star) - var_over_partition(a, Pi_star.endpoints)
    rhs = var_over_partition(ustar, Pi_inner) - var_over_partition(ustar, Pi_inner.endpoints)
    return lhs, rhs
