# checks.py
"""Executable property checks for the maximal operator.

Every check returns a :class:`PropertyReport`.  They are falsification
harnesses: slacks are explicit and recorded in the report metadata.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..detachment import component_of, decompose, detachment_set, grid_span
from ..errors import InconclusiveTransfer, MaxopError, TailRadiusError
from ..funcmodel import (
    PiecewiseLinearFn,
    StepFunction,
    abs_part,
    derivative,
    norm_w11,
    step_l1_distance,
    subtract,
)
from ..kernels import KernelFamily
from ..scalespace import MaximalProfile
from ..variation import (
    CoarseGridError,
    Partition,
    SampledFunction,
    alternating_reduction,
    extremal_partition,
    profile_value_fn,
    total_variation,
    transfer_identity_gap,
    transfer_partition,
    var_over_partition,
)
from .reports import (
    INCONCLUSIVE,
    NOT_APPLICABLE,
    RECORDED,
    PropertyReport,
    cells_in,
    derivative_gap_integral,
    exact_derivative_integral,
    fd_slack,
    make_report,
    tends_to_zero,
)
from .sequences import ContinuitySequence

logger = logging.getLogger(__name__)

TAIL_BUDGET = 1.0e6
VARIATION_RATIO_LIMIT = 1.02
CONVERGENCE_FRACTION = 0.05


def _meta(profile: MaximalProfile, **extra) -> Dict:
    meta = {"kernel": profile.kernel.name, "tol": profile.err}
    meta.update(extra)
    return meta


def _same_grid(p: MaximalProfile, q: MaximalProfile) -> None:
    if p.grid.shape != q.grid.shape or not np.array_equal(p.grid, q.grid):
        raise ValueError("profiles must share the grid")
    if p.kernel.name != q.kernel.name:
        raise ValueError("profiles must share the kernel")


def _sup_abs_gap(f: PiecewiseLinearFn, g: PiecewiseLinearFn) -> float:
    """``∥|f| − |g|∥_∞`` (attained on the merged breakpoints)."""
    a, b = abs_part(f), abs_part(g)
    xs = np.union1d(a.breakpoints, b.breakpoints)
    return float(np.max(np.abs(np.asarray(a(xs)) - np.asarray(b(xs)))))


# ---- subharmonicity ----------------------------------------------------
def convexity_violations(
    grid: np.ndarray,
    values: np.ndarray,
    intervals,
    slack: float,
) -> Tuple[List[Tuple[float, str]], float]:
    """Second-difference test on consecutive samples inside each interval.

    On a uniform grid the tested quantity is ``w_{i−1} − 2w_i + w_{i+1}``.
    Returns the witnesses and the largest violation (0 when none).
    """
    out = []
    worst = 0.0
    for l, r in intervals:
        idx = np.nonzero((grid > l) & (grid < r))[0]
        for i in idx[1:-1]:
            lam = (grid[i + 1] - grid[i]) / (grid[i + 1] - grid[i - 1])
            chord = lam * values[i - 1] + (1.0 - lam) * values[i + 1]
            second = 2.0 * (chord - values[i])
            worst = max(worst, -second)
            if second < -slack:
                out.append((float(grid[i]), f"second difference {second:.3e} < -{slack:.1e}"))
    return out, worst


def check_subharmonicity(profile: MaximalProfile, u: PiecewiseLinearFn, delta: float) -> PropertyReport:
    """``u*`` is convex on every component of the δ-detachment set."""
    D = detachment_set(profile, u, delta)
    slack = 4.0 * profile.err
    witnesses, worst = convexity_violations(profile.grid, profile.ustar, D, slack)
    return make_report(
        "subharmonicity",
        lhs=worst,
        rhs=0.0,
        slack=slack,
        witnesses=witnesses,
        metadata=_meta(profile, delta=delta, components=len(D), detachment=D.to_list()),
    )


# ---- uniform convergence -------------------------------------------------
def check_uniform_bound(
    u: PiecewiseLinearFn,
    u_j: PiecewiseLinearFn,
    profile: MaximalProfile,
    profile_j: MaximalProfile,
) -> PropertyReport:
    """``sup|u_j* − u*| ≤ ∥|u_j| − |u|∥_∞ ≤ ∥u_j − u∥_{1,1}`` up to ``2·err``."""
    _same_grid(profile, profile_j)
    gap = np.abs(profile_j.ustar - profile.ustar)
    lhs = float(np.max(gap))
    rhs = norm_w11(subtract(u_j, u))
    sharp = _sup_abs_gap(u_j, u)
    slack = profile.err + profile_j.err
    witnesses = []
    for i in np.nonzero(gap > sharp + slack)[0][:10]:
        witnesses.append((float(profile.grid[i]), f"|u_j* - u*| = {gap[i]:.6g} > sup-norm bound {sharp:.6g}"))
    if lhs > rhs + slack and not witnesses:
        witnesses.append((float(profile.grid[int(np.argmax(gap))]), f"exceeds W11 distance {rhs:.6g}"))
    return make_report(
        "uniform_bound",
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        witnesses=witnesses,
        metadata=_meta(profile, sup_norm_bound=sharp, w11_distance=rhs),
    )


def _convex_closed_form(profile: MaximalProfile, l: float, r: float) -> Tuple[float, float]:
    local = SampledFunction.from_profile(profile).restrict(l, r)
    sampled = float(np.sum(np.abs(np.diff(local.values))))
    closed = float(local.values[0] - 2.0 * np.min(local.values) + local.values[-1])
    return sampled, closed


# ---- tails ---------------------------------------------------------------
def _tail_residual(w: PiecewiseLinearFn, ustar: Callable[[float], float], R: float) -> Tuple[float, float]:
    a = abs_part(w)
    outside = total_variation(a, -math.inf, -R) + total_variation(a, R, math.inf)
    detached = ustar(R) - float(a(R)) + ustar(-R) - float(a(-R))
    return outside, detached


def pick_tail_radius(
    u: PiecewiseLinearFn,
    u_j: Optional[PiecewiseLinearFn],
    profile_fn: Callable[[PiecewiseLinearFn], Callable[[float], float]],
    eps: float,
    budget: float = TAIL_BUDGET,
) -> float:
    """Smallest doubling of the support radius with both tail conditions below ``ε/4``.

    The conditions are ``∫_{[−R,R]^c} |w′| ≤ ε/4`` and
    ``w*(R) − w(R) + w*(−R) − w(−R) < ε/4`` for ``w = u`` (and ``u_j``).
    ``profile_fn(w)`` returns the callable ``x ↦ w*(x)``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    funcs = [u] if u_j is None else [u, u_j]
    fns = [profile_fn(w) for w in funcs]
    R = max(w.support_radius for w in funcs)
    residual = math.inf
    while R <= budget:
        residual = 0.0
        ok = True
        for w, ustar in zip(funcs, fns):
            outside, detached = _tail_residual(w, ustar, R)
            residual = max(residual, outside, detached)
            if outside > eps / 4 or not detached < eps / 4:
                ok = False
                break
        if ok:
            logger.debug(f"pick_tail_radius: R={R:.4g} (eps={eps})")
            return R
        R *= 2.0
    raise TailRadiusError(R, residual)


def _tail_side(u: PiecewiseLinearFn, profile: MaximalProfile, R: float, right: bool) -> Dict[str, Any]:
    a = abs_part(u)
    lo, hi = grid_span(profile)
    interval = (R, hi) if right else (lo, R)
    edge = R
    sampled = derivative_gap_integral(profile.grid, profile.ustar, [interval])
    ustar_edge = float(profile.at(edge))
    bound = abs(ustar_edge - float(a(edge)))
    bound += total_variation(a, R, math.inf) if right else total_variation(a, -math.inf, R)
    # u* is convex off the support
    convex = R >= a.support[1] if right else R <= a.support[0]
    local, closed = _convex_closed_form(profile, *interval)
    return {
        "lhs": sampled,
        "rhs": bound,
        "slack": fd_slack(profile.err, cells_in(profile.grid, [interval])),
        "variation": local,
        "closed_form": closed,
        "convex": convex,
    }


def check_tail_bound(u: PiecewiseLinearFn, profile: MaximalProfile, R: float) -> PropertyReport:
    """``∫_{[R,∞)} |(u*)′| ≤ |u*(R) − u(R)| + ∫_{[R,∞)} |u′|``, mirrored at ``−R``."""
    lo, hi = grid_span(profile)
    if not (lo < -R and R < hi):
        raise ValueError(f"R={R!r} must lie inside the grid span")
    sides = {"right": _tail_side(u, profile, R, True), "left": _tail_side(u, profile, -R, False)}
    witnesses = []
    excess = -math.inf
    slack = max(s["slack"] for s in sides.values())
    for name, s in sides.items():
        over = s["lhs"] - s["rhs"]
        excess = max(excess, over)
        if over > s["slack"]:
            witnesses.append((R if name == "right" else -R, f"{name} tail: {s['lhs']:.6g} > {s['rhs']:.6g}"))
        if s["convex"] and abs(s["variation"] - s["closed_form"]) > s["slack"]:
            detail = f"{name} tail: variation {s['variation']:.6g} != closed form {s['closed_form']:.6g}"
            witnesses.append((R if name == "right" else -R, detail))
    return make_report(
        "tail_bound",
        lhs=max(excess, 0.0),
        rhs=0.0,
        slack=slack,
        witnesses=witnesses,
        metadata=_meta(profile, R=R, sides=sides),
    )


def check_tail_mass(
    u: PiecewiseLinearFn,
    u_j: PiecewiseLinearFn,
    profile: MaximalProfile,
    profile_j: MaximalProfile,
    R: float,
    eps: float,
) -> PropertyReport:
    """``∫_{[−R,R]^c} |(u_j*)′| + |(u*)′| < ε`` on the sampled span."""
    _same_grid(profile, profile_j)
    lo, hi = grid_span(profile)
    tails = [(lo, -R), (R, hi)]
    lhs = derivative_gap_integral(profile.grid, profile.ustar, tails)
    lhs += derivative_gap_integral(profile_j.grid, profile_j.ustar, tails)
    slack = 2.0 * fd_slack(profile.err, cells_in(profile.grid, tails))
    return make_report("tail_mass", lhs=lhs, rhs=eps, slack=slack, metadata=_meta(profile, R=R, eps=eps))


# ---- detachment gaps ---------------------------------------------------------
def check_lemma6(
    u: PiecewiseLinearFn,
    u_j: PiecewiseLinearFn,
    profile_j: MaximalProfile,
    v: StepFunction,
    eps: float,
    delta: Optional[float] = None,
) -> PropertyReport:
    """``∫_{⋃D_j^{2,i}} |(u_j*)′ − u_j′| < 4ε`` plus the per-gap comparison.

    On every component ``(c, d)`` inside the gap ``(a_i, a_{i+1})`` the
    convexity of ``u_j* − L_i`` (``L_i′ = α_i``) gives
    ``∫ |(u_j* − L_i)′| ≤ ∫ |(u_j − L_i)′|``.  The δ-threshold shifts the
    endpoint values by ``δ`` each, which enters as the correction
    ``2δ·#components``; a component cut by the grid end also carries
    ``u_j*`` at that end.
    """
    delta = delta if delta is not None else 10.0 * profile_j.err
    a, a_j = abs_part(u), abs_part(u_j)
    du, du_j = derivative(a), derivative(a_j)
    dist = step_l1_distance(du, du_j)
    approx = step_l1_distance(du, v)
    meta = _meta(profile_j, eps=eps, derivative_distance=dist, approximation_error=approx, delta=delta)
    if not (dist < eps and approx < eps):
        meta["reason"] = "hypotheses ||u'-u_j'|| < eps and ||u'-v|| < eps not met"
        return make_report("lemma6", lhs=dist, rhs=eps, slack=0.0, metadata=meta, status=NOT_APPLICABLE)

    span = grid_span(profile_j)
    D_j = detachment_set(profile_j, u_j, delta)
    parts = decompose(D_j, v)
    comps = parts.d2_components()
    grid, w = profile_j.grid, profile_j.ustar

    lhs = 0.0
    witnesses = []
    n_cells = 0
    for i, (c, d) in comps:
        cc, dd = max(c, span[0]), min(d, span[1])
        if not cc < dd:
            continue
        n_cells += cells_in(grid, [(cc, dd)])
        lhs += derivative_gap_integral(grid, w, [(cc, dd)], minus=a_j)
        alpha = v.level(i)
        left = derivative_gap_integral(grid, w, [(cc, dd)], offset=alpha)
        right = exact_derivative_integral(a_j, [(cc, dd)], offset=alpha)
        cut = (float(profile_j.at(cc)) if math.isinf(c) else 0.0) + (float(profile_j.at(dd)) if math.isinf(d) else 0.0)
        local_slack = fd_slack(profile_j.err, cells_in(grid, [(cc, dd)])) + 2.0 * delta + cut
        if left > right + local_slack:
            witnesses.append(((cc + dd) / 2.0, f"gap {i}: convex comparison {left:.6g} > {right:.6g}"))

    correction = 2.0 * delta * len(comps)
    meta.update(components=len(comps), correction=correction, ratio=lhs / (4.0 * eps), decomposition=parts.to_dict())
    return make_report(
        "lemma6",
        lhs=lhs,
        rhs=4.0 * eps + correction,
        slack=fd_slack(profile_j.err, n_cells),
        witnesses=witnesses,
        metadata=meta,
    )


# ---- components containing breakpoints --------------------------------------
def check_finite_intervals(
    u: PiecewiseLinearFn,
    seq: ContinuitySequence,
    profiles: Mapping[int, MaximalProfile],
    profile: MaximalProfile,
    delta: Optional[float] = None,
) -> PropertyReport:
    """``∫_{D_j¹} |(u_j*)′ − (u*)′| → 0`` and the endpoint-minus-twice-min form."""
    delta = delta if delta is not None else 10.0 * profile.err
    v = derivative(abs_part(u))
    scale = v.norm_l1()
    span = grid_span(profile)
    series = []
    slacks = []
    witnesses = []
    for j, u_j in seq:
        pj = profiles[j]
        _same_grid(profile, pj)
        parts = decompose(detachment_set(pj, u_j, delta), v)
        d1 = parts.d1.clipped(*span)
        series.append(derivative_gap_integral(profile.grid, pj.ustar - profile.ustar, d1))
        slacks.append(2.0 * fd_slack(pj.err, cells_in(profile.grid, d1)))
        for l, r in d1:
            sampled, closed = _convex_closed_form(pj, l, r)
            if abs(sampled - closed) > fd_slack(pj.err, cells_in(profile.grid, [(l, r)])):
                witnesses.append(((l + r) / 2.0, f"j={j}: variation {sampled:.6g} != closed form {closed:.6g}"))
    slack = max(slacks) if slacks else 0.0
    ok, reason = tends_to_zero(series, scale, slack, CONVERGENCE_FRACTION)
    if not ok:
        witnesses.append((math.nan, reason))
    return make_report(
        "finite_intervals",
        lhs=series[-1] if series else 0.0,
        rhs=CONVERGENCE_FRACTION * scale,
        slack=slack,
        witnesses=witnesses,
        metadata=_meta(profile, indices=list(seq.indices), series=series, reason=reason),
    )


# ---- variation norm convergence ---------------------------------------------
def _cell_refinement(w: SampledFunction, l: float, r: float, min_rise: float) -> np.ndarray:
    try:
        return extremal_partition(w, l, r, eps=max(4.0 * min_rise, 1e-12), min_rise=min_rise).points
    except CoarseGridError:
        return np.array([l, r])


def doubled_endpoint_partition(
    w: SampledFunction,
    coarse: Partition,
    min_rise: float = 0.0,
) -> Tuple[Partition, int]:
    """``{a_{i,k} : k ∈ {0, 1, n_i − 1, n_i}}`` over the cells of ``coarse``; returns it with ``K``."""
    pts = coarse.points
    chosen = []
    for l, r in zip(pts[:-1], pts[1:]):
        cell = _cell_refinement(w, float(l), float(r), min_rise)
        n = cell.size - 1
        for k in sorted({0, 1, n - 1, n}):
            if 0 <= k <= n:
                chosen.append(float(cell[k]))
    return Partition(np.unique(chosen)), pts.size - 1


def check_prop5(
    u: PiecewiseLinearFn,
    seq: ContinuitySequence,
    profiles: Mapping[int, MaximalProfile],
    profile: MaximalProfile,
    interval: Optional[Tuple[float, float]] = None,
    cells: int = 4,
) -> PropertyReport:
    """``∥(u_j*)′∥_{L¹(a,b)} → ∥(u*)′∥_{L¹(a,b)}`` with the partition bookkeeping."""
    a, b = interval if interval is not None else grid_span(profile)
    norm = derivative_gap_integral(profile.grid, profile.ustar, [(a, b)])
    coarse = Partition(np.linspace(a, b, cells + 1))
    series = []
    slacks = []
    witnesses = []
    cardinalities = []
    for j, u_j in seq:
        pj = profiles[j]
        _same_grid(profile, pj)
        nj = derivative_gap_integral(pj.grid, pj.ustar, [(a, b)])
        series.append(abs(nj - norm))
        slacks.append(2.0 * fd_slack(pj.err, cells_in(pj.grid, [(a, b)])))

        doubled, K = doubled_endpoint_partition(SampledFunction.from_profile(pj), coarse, 2.0 * pj.err)
        cardinalities.append(len(doubled))
        if len(doubled) > 3 * K + 1:
            witnesses.append((math.nan, f"j={j}: |P| = {len(doubled)} > 3K+1 = {3 * K + 1}"))
        var_j = var_over_partition(pj.at, doubled)
        var_0 = var_over_partition(profile.at, doubled)
        bound = var_0 + 12 * K * _sup_abs_gap(u_j, u) + 2.0 * (pj.err + profile.err) * len(doubled)
        if var_j > bound:
            witnesses.append((math.nan, f"j={j}: Var(u_j*, P) = {var_j:.6g} > {bound:.6g}"))

    slack = max(slacks) if slacks else 0.0
    ok, reason = tends_to_zero(series, norm, slack, CONVERGENCE_FRACTION)
    if not ok:
        witnesses.append((math.nan, reason))
    return make_report(
        "prop5",
        lhs=series[-1] if series else 0.0,
        rhs=CONVERGENCE_FRACTION * norm,
        slack=slack,
        witnesses=witnesses,
        metadata=_meta(
            profile,
            interval=[a, b],
            norm=norm,
            indices=list(seq.indices),
            series=series,
            cardinalities=cardinalities,
            reason=reason,
        ),
    )


check_variation_norm_convergence = check_prop5


# ---- convex limits ---------------------------------------------------------
def check_convex_limit(
    sequence: Sequence[Tuple[Tuple[float, float], SampledFunction]],
    limit: Optional[Tuple[Tuple[float, float], SampledFunction]] = None,
    slack: float = 1e-9,
    points: int = 33,
    slope_slack: Optional[float] = None,
) -> PropertyReport:
    """Uniform limits of convex functions are convex, with converging slopes.

    Each ``w_j`` must be convex on ``(l_j, r_j)``; a violation fails the
    precondition.  Without ``limit`` the last entry stands in for it.
    ``slack`` bounds second differences, ``slope_slack`` (default ``slack``)
    the slope deviations.
    """
    slope_slack = slack if slope_slack is None else slope_slack
    if not sequence:
        raise ValueError("empty sequence")
    witnesses = []
    for n, ((l, r), w) in enumerate(sequence):
        for x, detail in convexity_violations(w.grid, w.values, [(l, r)], slack)[0]:
            witnesses.append((x, f"precondition, w_{n} not convex: {detail}"))

    items = list(sequence)
    if limit is None:
        limit = items[-1]
        items = items[:-1] or items
    (l, r), w = limit
    witnesses += [(x, f"limit: {d}") for x, d in convexity_violations(w.grid, w.values, [(l, r)], slack)[0]]

    inner_l = max([l] + [iv[0] for iv, _ in items])
    inner_r = min([r] + [iv[1] for iv, _ in items])
    width = inner_r - inner_l
    if not width > 0:
        raise ValueError("intervals do not overlap")
    xs = np.linspace(inner_l + 0.1 * width, inner_r - 0.1 * width, points)

    def slopes(f: SampledFunction) -> np.ndarray:
        s = np.diff(f.values) / np.diff(f.grid)
        cell = np.clip(np.searchsorted(f.grid, xs, side="right") - 1, 0, s.size - 1)
        return s[cell]

    target = slopes(w)
    slope_range = float(np.ptp(target)) or 1.0
    deviations = [float(np.max(np.abs(slopes(f) - target))) for _, f in items]
    ok, reason = tends_to_zero(deviations, slope_range, slope_slack, CONVERGENCE_FRACTION)
    if not ok:
        witnesses.append((math.nan, f"slopes: {reason}"))
    return make_report(
        "convex_limit",
        lhs=deviations[-1],
        rhs=CONVERGENCE_FRACTION * slope_range,
        slack=slope_slack,
        witnesses=witnesses,
        metadata={"deviations": deviations, "slope_range": slope_range, "interval": [l, r], "reason": reason},
    )


def detached_members(
    seq: ContinuitySequence,
    profiles: Mapping[int, MaximalProfile],
    profile: MaximalProfile,
    delta: Optional[float] = None,
) -> Tuple[List[Tuple[Tuple[float, float], SampledFunction]], Optional[Tuple[Tuple[float, float], SampledFunction]]]:
    """``u_j*`` on the component of ``D_j`` around the midpoint of the widest component of ``D``.

    Returns the members and the limit ``u*`` on that component, clipped to the
    grid; indices whose ``D_j`` misses the midpoint are skipped.
    """
    delta = delta if delta is not None else 10.0 * profile.err
    span = grid_span(profile)
    D = detachment_set(profile, seq.base, delta).clipped(*span)
    if not D:
        return [], None
    l, r = max(D, key=lambda c: c[1] - c[0])
    mid = (l + r) / 2.0
    members = []
    for j, u_j in seq:
        pj = profiles[j]
        _same_grid(profile, pj)
        comp = component_of(detachment_set(pj, u_j, delta).clipped(*span), mid)
        if comp is None:
            logger.debug(f"detached_members: j={j} has no component at {mid:.4g}")
            continue
        members.append((comp, SampledFunction.from_profile(pj).restrict(*comp)))
    return members, ((l, r), SampledFunction.from_profile(profile).restrict(l, r))


# ---- variation bound -------------------------------------------------------
def check_variation_diminishing(u: PiecewiseLinearFn, profile: MaximalProfile) -> PropertyReport:
    """``∥(u*)′∥₁ / ∥u′∥₁ ≤ 1.02`` for Poisson and heat; recorded for fractional."""
    du = derivative(u).norm_l1()
    sampled = derivative_gap_integral(profile.grid, profile.ustar)
    ratio = 0.0 if du == 0.0 else sampled / du
    meta = _meta(profile, derivative_norm=du, maximal_variation=sampled, ratio=ratio)
    status = RECORDED if profile.kernel.family is KernelFamily.FRACTIONAL_POISSON else None
    if status:
        meta["reason"] = "no variation bound claimed for the fractional kernel"
    return make_report("variation_diminishing", lhs=ratio, rhs=VARIATION_RATIO_LIMIT, slack=0.0, metadata=meta, status=status)


# ---- supplements -----------------------------------------------------------
def check_abs_convergence(seq: ContinuitySequence) -> PropertyReport:
    """``∥|u_j| − |u|∥_{1,1} → 0`` along the indices."""
    base = abs_part(seq.base)
    series = [norm_w11(subtract(abs_part(u_j), base)) for _, u_j in seq]
    scale = norm_w11(base)
    ok, reason = tends_to_zero(series, scale, 1e-12, CONVERGENCE_FRACTION)
    return make_report(
        "abs_convergence",
        lhs=series[-1],
        rhs=CONVERGENCE_FRACTION * scale,
        slack=1e-12,
        witnesses=[] if ok else [(math.nan, reason)],
        metadata={"indices": list(seq.indices), "series": series, "mode": seq.mode, "reason": reason},
    )


def check_pointwise_derivative(
    seq: ContinuitySequence,
    profiles: Mapping[int, MaximalProfile],
    profile: MaximalProfile,
    delta: Optional[float] = None,
) -> PropertyReport:
    """``(u_j*)′ → (u*)′`` on the detachment set: median slope deviation on ``D``."""
    delta = delta if delta is not None else 10.0 * profile.err
    D = detachment_set(profile, seq.base, delta)
    g = profile.grid
    inside = np.zeros(g.size - 1, dtype=bool)
    for l, r in D:
        inside |= (g[:-1] >= l) & (g[1:] <= r)
    base = np.diff(profile.ustar) / np.diff(g)
    if not inside.any():
        meta = _meta(profile, reason="no grid cell inside the detachment set")
        return make_report("pointwise_derivative", lhs=0.0, rhs=0.0, slack=0.0, metadata=meta, status=NOT_APPLICABLE)
    series = []
    for j, _ in seq:
        pj = profiles[j]
        _same_grid(profile, pj)
        sj = np.diff(pj.ustar) / np.diff(g)
        series.append(float(np.median(np.abs(sj[inside] - base[inside]))))
    scale = float(np.max(np.abs(base[inside])))
    slack = 2.0 * profile.err / float(np.min(np.diff(g)[inside]))
    ok, reason = tends_to_zero(series, scale, slack, CONVERGENCE_FRACTION)
    return make_report(
        "pointwise_derivative",
        lhs=series[-1],
        rhs=CONVERGENCE_FRACTION * scale,
        slack=slack,
        witnesses=[] if ok else [(math.nan, reason)],
        metadata=_meta(profile, indices=list(seq.indices), series=series, reason=reason),
    )


def check_transfer_identity(
    u: PiecewiseLinearFn,
    profile: MaximalProfile,
    interval: Optional[Tuple[float, float]] = None,
    cells: int = 2,
) -> PropertyReport:
    """Partition transfer on every cell of an equispaced coarse partition.

    Checks the inner-variation identity within ``τ = 10·err`` per cell and the
    additivity of the transferred variation over the disjoint cells.
    """
    a, b = interval if interval is not None else u.support
    tau = 10.0 * profile.err
    coarse = np.linspace(a, b, cells + 1)
    w = SampledFunction.from_profile(profile)
    ustar = profile_value_fn(u, profile)
    abs_u = abs_part(u)
    witnesses = []
    inconclusive = []
    worst = 0.0
    per_cell = []
    transferred = []
    star_ends = []
    for l, r in zip(coarse[:-1], coarse[1:]):
        try:
            Pi = extremal_partition(w, float(l), float(r), eps=1.0, min_rise=4.0 * profile.err)
        except CoarseGridError:
            continue
        pts, _ = alternating_reduction(Pi, (float(l), float(r)), ustar)
        if pts.size < 3:
            continue
        Pi, inner = Partition(pts), Partition(pts[1:-1])
        try:
            star = transfer_partition(u, profile, Pi, (float(l), float(r)), ustar=ustar)
        except InconclusiveTransfer as e:
            inconclusive.append({"cell": [float(l), float(r)], "k": e.k, "margin": e.margin})
            continue
        except (MaxopError, ValueError) as e:
            witnesses.append(((l + r) / 2.0, f"transfer failed: {e}"))
            continue
        lhs, rhs = transfer_identity_gap(u, star, inner, ustar)
        gap = abs(lhs - rhs)
        worst = max(worst, gap)
        per_cell.append({"cell": [float(l), float(r)], "n": len(Pi) - 1, "lhs": lhs, "rhs": rhs})
        if gap > tau:
            witnesses.append(((l + r) / 2.0, f"identity gap {gap:.3e} > {tau:.1e}"))
        transferred.append(star.points)
        star_ends.append(star.endpoints.points)

    chain = None
    if transferred:
        P = Partition(coarse)
        full = P.union(*[Partition(s) for s in transferred])
        ends = P.union(*[Partition(e) for e in star_ends])
        left = var_over_partition(abs_u, full) - var_over_partition(abs_u, ends)
        right = sum(c_lhs["lhs"] for c_lhs in per_cell)
        chain = {"union": left, "sum": right}
        if abs(left - right) > 1e-9 * (1.0 + abs(right)):
            witnesses.append((math.nan, f"superadditivity chain {left:.12g} != {right:.12g}"))

    meta = _meta(profile, interval=[a, b], cells=per_cell, inconclusive=inconclusive, chain=chain, tau=tau)
    status = None
    if not witnesses and inconclusive:
        status = INCONCLUSIVE
        meta["reason"] = f"{len(inconclusive)} cell(s) within the profile error margin"
    return make_report("transfer_identity", lhs=worst, rhs=0.0, slack=tau, witnesses=witnesses, metadata=meta, status=status)
