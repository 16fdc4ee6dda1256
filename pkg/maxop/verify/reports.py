# reports.py
"""Property reports and the finite-difference integrals the checks share.

Derivative integrals of sampled functions use the slopes of the linear
interpolant on each grid cell; exact piecewise-linear derivatives are
evaluated on the merged cut set, so every integrand is piecewise constant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..funcmodel import PiecewiseLinearFn

logger = logging.getLogger(__name__)

PASSED = "passed"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not_applicable"
RECORDED = "recorded"
STATUSES = (PASSED, FAILED, INCONCLUSIVE, NOT_APPLICABLE, RECORDED)

Witness = Tuple[float, str]
Interval = Tuple[float, float]


def _number(x: Any) -> Any:
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): _number(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_number(v) for v in x]
    return x


@dataclass
class PropertyReport:
    """Verdict of one check.

    For inequality checks ``passed`` is ``lhs <= rhs + slack``; witnesses are
    nonempty exactly when the status is ``failed``.
    """

    name: str
    passed: bool
    lhs: float
    rhs: float
    slack: float
    witnesses: List[Witness] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    status: str = PASSED

    @property
    def failed(self) -> bool:
        return self.status == FAILED

    def to_dict(self) -> Dict[str, Any]:
        return _number(
            {
                "name": self.name,
                "status": self.status,
                "passed": self.passed,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "slack": self.slack,
                "witnesses": [[loc, detail] for loc, detail in self.witnesses],
                "metadata": self.metadata,
            }
        )


def make_report(
    name: str,
    lhs: float,
    rhs: float,
    slack: float,
    witnesses: Iterable[Witness] = (),
    metadata: Optional[Dict[str, Any]] = None,
    status: Optional[str] = None,
) -> PropertyReport:
    """Build a report; ``status`` overrides the inequality verdict."""
    wit = [(float(loc), str(detail)) for loc, detail in witnesses]
    meta = dict(metadata or {})
    if status is None:
        ok = lhs <= rhs + slack and not wit
        if not ok and not wit:
            wit = [(math.nan, f"lhs {lhs:.6g} exceeds rhs + slack {rhs + slack:.6g}")]
        status = PASSED if ok else FAILED
    elif status not in STATUSES:
        raise ValueError(f"unknown status {status!r}")
    elif status != FAILED:
        wit = []
    elif not wit:
        wit = [(math.nan, "check failed")]

    report = PropertyReport(
        name=name,
        passed=status != FAILED,
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        witnesses=wit,
        metadata=meta,
        status=status,
    )
    if status == FAILED:
        logger.info(f"{name}: FAILED lhs={lhs:.6g} rhs={rhs:.6g} slack={slack:.3g}")
    elif status in (INCONCLUSIVE, NOT_APPLICABLE):
        logger.warning(f"{name}: {status} ({meta.get('reason', 'no reason recorded')})")
    else:
        logger.debug(f"{name}: {status} lhs={lhs:.6g} rhs={rhs:.6g}")
    return report


# ---- convergence -------------------------------------------------------
def tends_to_zero(values: Sequence[float], scale: float, slack: float, fraction: float = 0.05) -> Tuple[bool, str]:
    """``→ 0`` along a finite sequence: non-increasing over the last three
    values (within ``slack``) and the final value below ``fraction·scale``.
    A sequence that stays within ``slack`` counts as converged."""
    vals = [float(v) for v in values]
    if not vals:
        return True, "empty sequence"
    if all(v <= slack for v in vals):
        return True, "all values within slack"
    tail = vals[-3:]
    decreasing = all(b <= a + slack for a, b in zip(tail, tail[1:]))
    small = vals[-1] <= fraction * scale + slack
    if decreasing and small:
        return True, "decreasing tail, final below threshold"
    reasons = []
    if not decreasing:
        reasons.append("tail not decreasing")
    if not small:
        reasons.append(f"final {vals[-1]:.4g} above {fraction}·{scale:.4g}")
    return False, ", ".join(reasons)


# ---- finite-difference integrals ------------------------------------------
def _as_intervals(intervals: Optional[Iterable[Interval]], lo: float, hi: float) -> List[Interval]:
    if intervals is None:
        return [(lo, hi)]
    out = []
    for l, r in intervals:
        l, r = max(float(l), lo), min(float(r), hi)
        if l < r:
            out.append((l, r))
    return out


def _cuts(grid: np.ndarray, ivs: List[Interval], extra: Iterable[np.ndarray] = ()) -> np.ndarray:
    pieces = [grid, np.array([x for iv in ivs for x in iv])]
    for arr in extra:
        pieces.append(arr[(arr > grid[0]) & (arr < grid[-1])])
    return np.unique(np.concatenate(pieces))


def _in_intervals(xs: np.ndarray, ivs: List[Interval]) -> np.ndarray:
    mask = np.zeros(xs.size, dtype=bool)
    for l, r in ivs:
        mask |= (xs > l) & (xs < r)
    return mask


def cell_slopes(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.diff(values) / np.diff(grid)


def derivative_gap_integral(
    grid: np.ndarray,
    values: np.ndarray,
    intervals: Optional[Iterable[Interval]] = None,
    minus: Optional[PiecewiseLinearFn] = None,
    offset: float = 0.0,
) -> float:
    """``∫_I |w′ − f′ − offset|`` with ``w`` the interpolant of the samples.

    ``I`` is the union of ``intervals`` clipped to the grid span (the whole
    span when ``None``); ``f = minus`` is exact piecewise linear.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.size < 2:
        return 0.0
    lo, hi = float(grid[0]), float(grid[-1])
    ivs = _as_intervals(intervals, lo, hi)
    if not ivs:
        return 0.0
    extra = [minus.breakpoints] if minus is not None else []
    cuts = _cuts(grid, ivs, extra)
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    lengths = np.diff(cuts)
    mask = _in_intervals(mids, ivs)
    slopes = cell_slopes(grid, values)
    cell = np.clip(np.searchsorted(grid, mids, side="right") - 1, 0, slopes.size - 1)
    integrand = slopes[cell] - offset
    if minus is not None:
        fs = minus.slopes
        j = np.searchsorted(minus.breakpoints, mids, side="right") - 1
        inside = (j >= 0) & (j < fs.size)
        integrand = integrand - np.where(inside, fs[np.clip(j, 0, fs.size - 1)], 0.0)
    return float(np.sum(np.abs(integrand[mask]) * lengths[mask]))


def exact_derivative_integral(
    f: PiecewiseLinearFn,
    intervals: Iterable[Interval],
    offset: float = 0.0,
    span: Optional[Interval] = None,
) -> float:
    """``∫_I |f′ − offset|`` exactly, ``I`` clipped to ``span`` when given."""
    lo, hi = span if span is not None else (-math.inf, math.inf)
    ivs = _as_intervals(intervals, lo, hi)
    if not ivs:
        return 0.0
    ends = np.array([x for iv in ivs for x in iv])
    finite = ends[np.isfinite(ends)]
    cuts = np.unique(np.concatenate((f.breakpoints, finite)))
    total = 0.0
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    lengths = np.diff(cuts)
    mask = _in_intervals(mids, ivs)
    fs = f.slopes
    j = np.searchsorted(f.breakpoints, mids, side="right") - 1
    inside = (j >= 0) & (j < fs.size)
    slope = np.where(inside, fs[np.clip(j, 0, fs.size - 1)], 0.0)
    total += float(np.sum(np.abs(slope[mask] - offset) * lengths[mask]))
    if offset != 0.0:
        # pieces beyond the cut span have f′ = 0 and carry |offset| per unit length
        for l, r in ivs:
            outside = max(0.0, min(r, cuts[0]) - l) + max(0.0, r - max(l, cuts[-1]))
            if math.isinf(outside):
                raise ValueError("nonzero offset on an unbounded interval")
            total += abs(offset) * outside
    return total


def fd_slack(err: float, n_cells: int) -> float:
    """Worst-case effect of per-sample errors ``err`` on a sampled variation."""
    return 2.0 * err * max(int(n_cells), 1)


def cells_in(grid: np.ndarray, intervals: Optional[Iterable[Interval]]) -> int:
    grid = np.asarray(grid, dtype=float)
    ivs = _as_intervals(intervals, float(grid[0]), float(grid[-1]))
    mids = 0.5 * (grid[:-1] + grid[1:])
    return int(np.count_nonzero(_in_intervals(mids, ivs))) + 2 * len(ivs)
