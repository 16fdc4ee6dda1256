# continuity.py
"""``u_j → u`` in ``W^{1,1}`` implies ``(u_j*)′ → (u*)′`` in ``L¹``, at desk scale.

For every index ``j`` the experiment records ``∥u_j − u∥_{1,1}``,
``sup|u_j* − u*|`` and ``E_j = ∫ |(u_j*)′ − (u*)′|`` over the grid span,
split over the contact set ``C`` and the detachment set ``D`` of ``u``; the
contact part is further split over ``C ∩ C_j`` and ``C ∩ D_j``.  On ``C`` the
derivative of ``u*`` is replaced by that of the sampled ``|u|`` to test the
a.e. identity ``(u*)′ = u′`` there.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..detachment import detachment_set, grid_span
from ..funcmodel import abs_part, derivative
from ..kernels import KernelSpec
from ..scalespace import MaximalProfile, adaptive_grid, maximal_function, maximal_profile
from .checks import CONVERGENCE_FRACTION, check_finite_intervals, check_pointwise_derivative, pick_tail_radius
from .reports import PropertyReport, cells_in, derivative_gap_integral, fd_slack, make_report, tends_to_zero
from .sequences import ContinuitySequence

logger = logging.getLogger(__name__)

REFINEMENT_AGREEMENT = 0.05


@dataclass
class ContinuityRow:
    j: int
    w11_distance: float
    sup_gap: float
    energy: float
    contact: float
    detached: float
    contact_contact: float
    contact_detached: float
    contact_exact: float
    identity_gap: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ContinuityResult:
    rows: List[ContinuityRow]
    report: PropertyReport
    profile: MaximalProfile
    profiles: Dict[int, MaximalProfile] = field(default_factory=dict)
    refinement: Optional[Dict[str, float]] = None


def continuity_grid(seq: ContinuitySequence, k: KernelSpec, n: int, tol: float) -> np.ndarray:
    """Adaptive grid out to the tail radius for ``ε = 0.01·∥u′∥₁``."""
    u = seq.base
    eps = 0.01 * (derivative(u).norm_l1() or 1.0)
    R = pick_tail_radius(u, seq[seq.indices[0]], lambda w: maximal_function(w, k, tol), eps)
    lo = min(u.support[0], *(m.support[0] for _, m in seq))
    hi = max(u.support[1], *(m.support[1] for _, m in seq))
    return adaptive_grid((lo, hi), R, n)


def _energy_row(
    j: int,
    seq: ContinuitySequence,
    profile: MaximalProfile,
    pj: MaximalProfile,
    delta: float,
) -> ContinuityRow:
    u = abs_part(seq.base)
    grid = profile.grid
    span = grid_span(profile)
    diff = pj.ustar - profile.ustar
    D = detachment_set(profile, seq.base, delta)
    C = D.complement(*span)
    D_j = detachment_set(pj, seq[j], delta)
    C_j = D_j.complement(*span)

    energy = derivative_gap_integral(grid, diff)
    detached = derivative_gap_integral(grid, diff, D)
    contact = derivative_gap_integral(grid, diff, C)
    cc = derivative_gap_integral(grid, diff, C.intersection(C_j))
    cd = derivative_gap_integral(grid, diff, C.intersection(D_j))
    # sampled |u| so kinks of u inside a cell cancel against the same interpolation in u*
    exact = derivative_gap_integral(grid, pj.ustar - np.asarray(u(grid)), C)
    return ContinuityRow(
        j=j,
        w11_distance=seq.distance(j),
        sup_gap=float(np.max(np.abs(diff))),
        energy=energy,
        contact=contact,
        detached=detached,
        contact_contact=cc,
        contact_detached=cd,
        contact_exact=exact,
        identity_gap=abs(energy - (exact + detached)),
    )


def refine(grid: np.ndarray) -> np.ndarray:
    """Grid with every cell halved."""
    mids = 0.5 * (grid[:-1] + grid[1:])
    out = np.empty(grid.size + mids.size)
    out[0::2] = grid
    out[1::2] = mids
    return out


def _agreement(coarse: float, fine: float, slack: float) -> Dict[str, Any]:
    agree = abs(coarse - fine) <= REFINEMENT_AGREEMENT * max(abs(fine), abs(coarse)) + slack
    return {"h": coarse, "h/2": fine, "agree": agree}


def energy_table(
    seq: ContinuitySequence,
    profile: MaximalProfile,
    profiles: Dict[int, MaximalProfile],
    delta: float,
) -> List[ContinuityRow]:
    return [_energy_row(j, seq, profile, profiles[j], delta) for j in seq.indices]


def continuity_report(
    seq: ContinuitySequence,
    rows: List[ContinuityRow],
    profile: MaximalProfile,
    delta: float,
    refinement: Optional[Dict[str, Any]] = None,
) -> PropertyReport:
    """``E_j → 0`` along the rows plus the contact/detached split of every ``E_j``."""
    grid, tol = profile.grid, profile.err
    scale = derivative(seq.base).norm_l1()
    slack = 2.0 * fd_slack(tol, cells_in(grid, None))
    series = [r.energy for r in rows]
    ok, reason = tends_to_zero(series, scale, slack, CONVERGENCE_FRACTION)
    witnesses = [] if ok else [(math.nan, reason)]

    n_components = len(detachment_set(profile, seq.base, delta))
    identity_slack = 2.0 * slack + 4.0 * delta * (n_components + 1)
    for row in rows:
        if row.identity_gap > identity_slack:
            witnesses.append((math.nan, f"j={row.j}: E != contact + detached (gap {row.identity_gap:.3e})"))

    return make_report(
        "continuity",
        lhs=series[-1],
        rhs=CONVERGENCE_FRACTION * scale,
        slack=slack,
        witnesses=witnesses,
        metadata={
            "kernel": profile.kernel.name,
            "tol": tol,
            "delta": delta,
            "mode": seq.mode,
            "rows": [r.to_dict() for r in rows],
            "refinement": refinement,
            "reason": reason,
        },
    )


def refinement_check(
    seq: ContinuitySequence,
    kernel: KernelSpec,
    grid: np.ndarray,
    rows: List[ContinuityRow],
    profile: MaximalProfile,
    profiles: Dict[int, MaximalProfile],
    delta: float,
    threads: Optional[int] = None,
) -> Dict[str, Any]:
    """Last-index quantities on ``grid`` and on the halved grid.

    Covers ``E_j`` (top-level ``h``, ``h/2``, ``agree``) and the last values
    of the finite-interval and pointwise-derivative series.
    """
    tol = profile.err
    last = seq.final()
    fine = refine(grid)
    pf = maximal_profile(seq.base, kernel, fine, tol, threads=threads)
    pjf = maximal_profile(seq[last.last], kernel, fine, tol, threads=threads)
    slack = 2.0 * fd_slack(tol, cells_in(grid, None))
    out = _agreement(rows[-1].energy, derivative_gap_integral(fine, pjf.ustar - pf.ustar), slack)

    coarse = {last.last: profiles[last.last]}
    fine_profiles = {last.last: pjf}
    finite = (
        check_finite_intervals(seq.base, last, coarse, profile, delta),
        check_finite_intervals(seq.base, last, fine_profiles, pf, delta),
    )
    out["finite_intervals"] = _agreement(finite[0].lhs, finite[1].lhs, slack)
    pointwise = (
        check_pointwise_derivative(last, coarse, profile, delta),
        check_pointwise_derivative(last, fine_profiles, pf, delta),
    )
    out["pointwise_derivative"] = _agreement(pointwise[0].lhs, pointwise[1].lhs, max(pointwise[0].slack, pointwise[1].slack))
    for name in ("finite_intervals", "pointwise_derivative"):
        if not out[name]["agree"]:
            logger.warning(f"continuity[{kernel.name}]: {name} disagrees under refinement, {out[name]}")
    if not out["agree"]:
        logger.warning(f"continuity[{kernel.name}]: grid refinement disagrees, E_h={out['h']:.4g}, E_h/2={out['h/2']:.4g}")
    return out


def continuity_experiment(
    seq: ContinuitySequence,
    kernel: KernelSpec,
    grid: Optional[np.ndarray] = None,
    tol: float = 1e-5,
    delta: Optional[float] = None,
    grid_n: int = 256,
    threads: Optional[int] = None,
    check_refinement: bool = True,
) -> ContinuityResult:
    """Table of ``E_j`` along the sequence and the ``E_j → 0`` verdict."""
    delta = delta if delta is not None else 10.0 * tol
    if grid is None:
        grid = continuity_grid(seq, kernel, grid_n, tol)
    grid = np.asarray(grid, dtype=float)

    profile = maximal_profile(seq.base, kernel, grid, tol, threads=threads)
    profiles = {j: maximal_profile(u_j, kernel, grid, tol, threads=threads) for j, u_j in seq}
    rows = energy_table(seq, profile, profiles, delta)
    for row in rows:
        logger.info(
            f"continuity[{kernel.name}] j={row.j}: ||u_j-u||={row.w11_distance:.4g} "
            f"sup={row.sup_gap:.4g} E={row.energy:.4g} (C {row.contact:.3g}, D {row.detached:.3g})"
        )

    refinement = None
    if check_refinement and seq.indices:
        refinement = refinement_check(seq, kernel, grid, rows, profile, profiles, delta, threads)
    report = continuity_report(seq, rows, profile, delta, refinement)
    return ContinuityResult(rows=rows, report=report, profile=profile, profiles=profiles, refinement=refinement)
