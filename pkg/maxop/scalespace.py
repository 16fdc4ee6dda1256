# scalespace.py
"""Scale-space extension ``ũ(x,t) = (|u| ∗ φ_t)(x)`` and the maximal function.

``u*(x) = max(|u|(x), sup_{t>0} ũ(x,t))`` is computed by a certified search
over scales:

1. a geometric ladder ``t_min·ρ^j`` (``ρ ≤ 1.25``) is evaluated in chunks
   until ``φ(0)·∥u∥₁/T`` drops below the best candidate, so no scale beyond
   the cutoff ``T_max`` can beat it;
2. every local maximum of the ladder is refined by a section search in
   ``log t`` until the bracket's value spread is at most ``tol``.

The ``t → 0`` endpoint ``|u|(x)`` is always a candidate and is exact.

For piecewise-linear ``|u|`` the convolution of every linear segment with
the dilated kernel has a closed form in terms of ``Φ₀`` and ``Φ₁``
(see :mod:`maxop.kernels`), so the default evaluator is exact to roundoff.
A per-segment ``scipy.integrate.quad`` evaluator is kept for cross-checks.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from .config import thread_count
from .errors import CertificationError, QuadratureError
from .funcmodel import PiecewiseLinearFn, abs_part, norm_l1
from .kernels import KernelSpec, sup_decay_bound

logger = logging.getLogger(__name__)

DEFAULT_RHO = 1.1
LADDER_CHUNK = 64
MAX_LADDER = 4000
MAX_REFINE = 80
SECTION_POINTS = 9


@dataclass(frozen=True, eq=False)
class Segments:
    """Linear pieces of ``|u|``: ``[p, q]`` with end values ``vp, vq``."""

    p: np.ndarray
    q: np.ndarray
    vp: np.ndarray
    vq: np.ndarray
    l1: float
    source: PiecewiseLinearFn

    @classmethod
    def of(cls, u: PiecewiseLinearFn) -> "Segments":
        a = abs_part(u)
        b, v = a.breakpoints, a.values
        keep = (v[:-1] != 0) | (v[1:] != 0)
        return cls(
            p=b[:-1][keep], q=b[1:][keep], vp=v[:-1][keep], vq=v[1:][keep], l1=norm_l1(a), source=a
        )

    @property
    def resolution(self) -> float:
        if self.p.size == 0:
            return 1.0
        return float(np.min(self.q - self.p))

    def value(self, x: float) -> float:
        return float(self.source(x))


@dataclass(frozen=True, eq=False)
class MaximalProfile:
    """Sampled ``u*`` with the maximizing scale per point and a uniform error bound."""

    grid: np.ndarray
    ustar: np.ndarray
    tstar: np.ndarray
    err: float
    kernel: KernelSpec

    def __post_init__(self) -> None:
        for name in ("grid", "ustar", "tstar"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.grid.size == self.ustar.size == self.tstar.size):
            raise ValueError("grid, ustar and tstar must have equal length")
        if not np.all(np.isfinite(self.ustar)) or np.any(self.tstar < 0):
            raise ValueError("ustar must be finite and tstar nonnegative")

    @property
    def spacing(self) -> float:
        return float(np.min(np.diff(self.grid))) if self.grid.size > 1 else 0.0

    def at(self, x):
        """Linear interpolation of the samples (clamped at the grid ends)."""
        out = np.interp(np.asarray(x, dtype=float), self.grid, self.ustar)
        return float(out) if np.ndim(out) == 0 else out

    def index_of(self, x: float) -> Optional[int]:
        i = int(np.searchsorted(self.grid, x))
        if i < self.grid.size and self.grid[i] == x:
            return i
        return None

    def with_values(self, ustar: np.ndarray) -> "MaximalProfile":
        """Copy with replaced samples (used to build negative-control fixtures)."""
        return MaximalProfile(self.grid, ustar, self.tstar, self.err, self.kernel)


# ---- extension ----------------------------------------------------------
def extension_ladder(segs: Segments, k: KernelSpec, x: float, ts: np.ndarray) -> np.ndarray:
    """Exact ``ũ(x, t)`` for an array of scales, via closed-form antiderivatives."""
    ts = np.asarray(ts, dtype=float)
    if segs.p.size == 0:
        return np.zeros_like(ts)
    t = ts[:, None]
    slope = (segs.vq - segs.vp) / (segs.q - segs.p)
    a_coef = segs.vp + slope * (x - segs.p)
    b_coef = slope * t
    zp = (x - segs.p) / t
    zq = (x - segs.q) / t
    mass = k.antiderivative(zp) - k.antiderivative(zq)
    moment = k.first_moment_antiderivative(zp) - k.first_moment_antiderivative(zq)
    return np.sum(a_coef * mass - b_coef * moment, axis=1)


def _extension_quadrature(segs: Segments, k: KernelSpec, x: float, t: float, tol: float) -> float:
    total = 0.0
    achieved = 0.0
    per_segment = tol / max(segs.p.size, 1)
    for p, q, vp, vq in zip(segs.p, segs.q, segs.vp, segs.vq):
        slope = (vq - vp) / (q - p)

        def integrand(y, p=p, vp=vp, slope=slope):
            return (vp + slope * (y - p)) * float(k((x - y) / t)) / t

        points = [x] if p < x < q else None
        value, err = integrate.quad(integrand, p, q, epsabs=per_segment, epsrel=0.0, limit=200, points=points)
        total += value
        achieved += err
    if achieved > tol:
        raise QuadratureError(f"extension at x={x!r}, t={t!r}", achieved)
    return total


def extension(
    u: PiecewiseLinearFn,
    k: KernelSpec,
    x: float,
    t: float,
    tol: float = 1e-7,
    method: str = "exact",
) -> float:
    """``ũ(x,t) = ∫ |u|(y) φ_t(x − y) dy`` over ``supp u`` with absolute error ≤ ``tol``."""
    if t <= 0:
        raise ValueError(f"scale must be positive, got {t!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    segs = Segments.of(u)
    if method == "exact":
        return float(extension_ladder(segs, k, float(x), np.array([t]))[0])
    if method == "quadrature":
        return _extension_quadrature(segs, k, float(x), float(t), tol)
    raise ValueError(f"unknown extension method: {method!r}")


# ---- maximal function ---------------------------------------------------
def _section_search(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float,
    x: float,
) -> Tuple[float, float]:
    """Maximize ``fn`` over ``[lo, hi]`` (log-scale) by repeated k-section.

    Each round samples ``SECTION_POINTS`` interior points and keeps the two
    cells around the best sample; with two interior points this is ternary
    search.  Stops once the values at the kept bracket differ by ≤ ``tol``.
    """
    best_s, best_v = lo, -math.inf
    for _ in range(MAX_REFINE):
        s = np.linspace(lo, hi, SECTION_POINTS + 2)
        v = fn(s)
        i = int(np.argmax(v))
        if v[i] > best_v:
            best_s, best_v = float(s[i]), float(v[i])
        left, right = max(i - 1, 0), min(i + 1, s.size - 1)
        spread = float(np.max(v[left:right + 1]) - np.min(v[left:right + 1]))
        lo, hi = float(s[left]), float(s[right])
        if spread <= tol or hi - lo <= 1e-13 * max(1.0, abs(lo)):
            return best_s, best_v
    raise CertificationError(x, best_v, spread, "scale refinement did not converge")


def default_t_min(segs: Segments, grid_spacing: Optional[float] = None) -> float:
    resolution = segs.resolution
    if grid_spacing:
        resolution = min(resolution, grid_spacing)
    return resolution / 10.0


def _maximal_from_segments(
    segs: Segments,
    k: KernelSpec,
    x: float,
    tol: float,
    t_min: float,
    rho: float,
) -> Tuple[float, float]:
    ux = segs.value(x)
    if segs.l1 == 0.0:
        return 0.0, 0.0
    best, t_best = ux, 0.0

    log_rho = math.log(rho)
    log_t0 = math.log(t_min)
    values: list[np.ndarray] = []
    j = 0
    while True:
        if j >= MAX_LADDER:
            cutoff = sup_decay_bound(k, math.exp(log_t0 + (j - 1) * log_rho), segs.l1)
            raise CertificationError(x, best, cutoff - best, "scale ladder budget exhausted")
        ts = np.exp(log_t0 + log_rho * np.arange(j, j + LADDER_CHUNK))
        vals = extension_ladder(segs, k, x, ts)
        values.append(vals)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, t_best = float(vals[i]), float(ts[i])
        j += LADDER_CHUNK
        if sup_decay_bound(k, float(ts[-1]), segs.l1) < best:
            break

    ladder = np.concatenate(values)
    n = ladder.size
    left = np.concatenate(([-math.inf], ladder[:-1]))
    right = np.concatenate((ladder[1:], [-math.inf]))
    peaks = np.nonzero((ladder >= left) & (ladder >= right) & (ladder > np.minimum(left, right)) & (ladder > 0))[0]

    def in_log_scale(s: np.ndarray) -> np.ndarray:
        return extension_ladder(segs, k, x, np.exp(s))

    for i in peaks:
        lo = log_t0 + (i - 1) * log_rho
        hi = log_t0 + min(i + 1, n - 1) * log_rho
        s_star, v_star = _section_search(in_log_scale, lo, hi, tol, x)
        if v_star > best:
            best, t_best = v_star, math.exp(s_star)

    logger.debug(
        f"maximal_at x={x:.6g}: ladder={n}, T_max={math.exp(log_t0 + (n - 1) * log_rho):.3g}, "
        f"peaks={peaks.size}, value={best:.10g}, t={t_best:.4g}"
    )
    return best, t_best


def maximal_at(
    u: PiecewiseLinearFn,
    k: KernelSpec,
    x: float,
    tol: float = 1e-7,
    t_min: Optional[float] = None,
    rho: float = DEFAULT_RHO,
) -> Tuple[float, float]:
    """``(u*(x), t_at)``; ``t_at = 0`` when the endpoint ``|u|(x)`` wins."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not 1.0 < rho <= 1.25:
        raise ValueError("ladder ratio must lie in (1, 1.25]")
    segs = Segments.of(u)
    t0 = t_min if t_min is not None else default_t_min(segs)
    return _maximal_from_segments(segs, k, float(x), tol, t0, rho)


def maximal_profile(
    u: PiecewiseLinearFn,
    k: KernelSpec,
    grid: np.ndarray,
    tol: float = 1e-7,
    t_min: Optional[float] = None,
    rho: float = DEFAULT_RHO,
    threads: Optional[int] = None,
) -> MaximalProfile:
    """Evaluate :func:`maximal_at` on every grid point (concurrently, order-independent)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a nonempty 1-D array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if tol <= 0:
        raise ValueError("tol must be positive")

    segs = Segments.of(u)
    spacing = float(np.min(np.diff(grid))) if grid.size > 1 else None
    t0 = t_min if t_min is not None else default_t_min(segs, spacing)
    ustar = np.zeros(grid.size)
    tstar = np.zeros(grid.size)

    def work(i: int) -> None:
        ustar[i], tstar[i] = _maximal_from_segments(segs, k, float(grid[i]), tol, t0, rho)

    workers = threads if threads is not None else thread_count()
    if workers <= 1:
        for i in range(grid.size):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # list() re-raises the first per-point failure
            list(pool.map(work, range(grid.size)))

    logger.debug(f"maximal_profile: {grid.size} points, kernel={k.name}, tol={tol}")
    return MaximalProfile(grid=grid, ustar=ustar, tstar=tstar, err=tol, kernel=k)


def maximal_function(u: PiecewiseLinearFn, k: KernelSpec, tol: float = 1e-7, t_min: Optional[float] = None):
    """Callable ``x ↦ u*(x)`` for off-grid access (tail radius search, transfers)."""
    segs = Segments.of(u)
    t0 = t_min if t_min is not None else default_t_min(segs)

    def ustar(x: float) -> float:
        return _maximal_from_segments(segs, k, float(x), tol, t0, DEFAULT_RHO)[0]

    return ustar


def adaptive_grid(support: Tuple[float, float], radius: float, n: int, inner_fraction: float = 0.6) -> np.ndarray:
    """``n`` points: uniform over the padded support, geometric out to ``±radius``."""
    if n < 4:
        raise ValueError("grid needs at least 4 points")
    lo, hi = support
    pad = 0.1 * (hi - lo)
    a, b = lo - pad, hi + pad
    n_tail = int(n * (1.0 - inner_fraction)) // 2
    h = (b - a) / max(n - 2 * n_tail - 1, 1)
    if radius <= max(-a, b) + h or n_tail < 2:
        r = max(radius, -a, b)
        return np.linspace(-r, r, n)
    inner = np.linspace(a, b, n - 2 * n_tail)
    left = a - np.geomspace(h, a + radius, n_tail)[::-1] if a + radius > h else np.array([])
    right = b + np.geomspace(h, radius - b, n_tail) if radius - b > h else np.array([])
    if left.size == 0 or right.size == 0:
        return np.linspace(-max(radius, -a, b), max(radius, -a, b), n)
    return np.concatenate((left, inner, right))
