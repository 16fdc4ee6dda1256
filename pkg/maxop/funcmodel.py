# funcmodel.py
"""Compactly supported continuous piecewise-linear functions.

A :class:`PiecewiseLinearFn` is the discrete model of ``u ∈ W^{1,1}(ℝ)``:
breakpoints ``b₀ < … < b_last`` with values ``v₀ … v_last`` where the first
and last values are exactly zero, so the function vanishes outside
``[b₀, b_last]``.  Its weak derivative is exactly the :class:`StepFunction`
of segment slopes, which makes every norm and variation an exact finite sum.

Instances are immutable (the underlying arrays are flagged read-only) and
all operations are pure, so they can be shared between worker threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _frozen(values: ArrayLike) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Step function ``Σ αᵢ χ_(aᵢ, aᵢ₊₁)``, zero outside ``[a₁, a_{N+1}]``.

    ``breakpoints`` holds ``a₁ < … < a_{N+1}`` and ``levels`` the ``N``
    inner levels.  The outer levels ``α₀ = α_{N+1} = 0`` on the two
    unbounded gaps are implicit; :meth:`level` exposes the full
    ``0 … N+1`` indexing with ``a₀ = −∞`` and ``a_{N+2} = +∞``.
    """

    breakpoints: np.ndarray
    levels: np.ndarray

    def __post_init__(self) -> None:
        b = _frozen(self.breakpoints)
        lv = _frozen(self.levels)
        if b.size < 1:
            raise ValueError("step function needs at least one breakpoint")
        if lv.size != max(b.size - 1, 0):
            raise ValueError(f"expected {b.size - 1} levels, got {lv.size}")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(lv)):
            raise ValueError("levels must be finite")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "levels", lv)

    @property
    def n_pieces(self) -> int:
        return int(self.levels.size)

    def level(self, i: int) -> float:
        """Level on the gap ``(aᵢ, aᵢ₊₁)`` for ``i = 0 … N+1``."""
        if i <= 0 or i > self.n_pieces:
            return 0.0
        return float(self.levels[i - 1])

    def gap(self, i: int) -> tuple[float, float]:
        """The open gap ``(aᵢ, aᵢ₊₁)`` with the ``±∞`` conventions."""
        b = self.breakpoints
        left = -np.inf if i <= 0 else float(b[i - 1])
        right = np.inf if i >= b.size else float(b[i])
        return left, right

    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        xs = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, xs, side="right")
        padded = np.concatenate(([0.0], self.levels, [0.0]))
        out = padded[idx]
        return float(out) if out.ndim == 0 else out

    def norm_l1(self) -> float:
        return float(np.sum(np.abs(self.levels) * np.diff(self.breakpoints)))

    def to_dict(self) -> Dict[str, Any]:
        return {"breakpoints": self.breakpoints.tolist(), "levels": self.levels.tolist()}


def step_l1_distance(f: StepFunction, g: StepFunction) -> float:
    """Exact ``∥f − g∥₁`` on the merged breakpoint set."""
    merged = np.union1d(f.breakpoints, g.breakpoints)
    if merged.size < 2:
        return 0.0
    mids = 0.5 * (merged[:-1] + merged[1:])
    return float(np.sum(np.abs(f(mids) - g(mids)) * np.diff(merged)))


@dataclass(frozen=True, eq=False)
class PiecewiseLinearFn:
    """Continuous piecewise-linear function with compact support."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        b = _frozen(self.breakpoints)
        v = _frozen(self.values)
        if b.size < 2:
            raise ValueError("need at least two breakpoints")
        if b.size != v.size:
            raise ValueError(f"{b.size} breakpoints but {v.size} values")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(v))):
            raise ValueError("breakpoints and values must be finite")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if v[0] != 0.0 or v[-1] != 0.0:
            raise ValueError("first and last values must be exactly 0 (compact support)")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    # ---- evaluation -------------------------------------------------
    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        return eval_fn(self, x)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def support_radius(self) -> float:
        return float(max(abs(self.breakpoints[0]), abs(self.breakpoints[-1])))

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.breakpoints)

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    def allclose(self, other: "PiecewiseLinearFn", atol: float = 1e-12) -> bool:
        """Pointwise equality on the merged breakpoint set."""
        xs = np.union1d(self.breakpoints, other.breakpoints)
        return bool(np.allclose(self(xs), other(xs), rtol=0.0, atol=atol))

    def to_dict(self) -> Dict[str, Any]:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}


def eval_fn(f: PiecewiseLinearFn, x: ArrayLike) -> Union[float, np.ndarray]:
    """Linear interpolation inside the support, zero outside."""
    out = np.interp(np.asarray(x, dtype=float), f.breakpoints, f.values, left=0.0, right=0.0)
    return float(out) if np.ndim(out) == 0 else out


def derivative(f: PiecewiseLinearFn) -> StepFunction:
    """The weak derivative: slope step function on the same breakpoints."""
    return StepFunction(breakpoints=f.breakpoints, levels=f.slopes)


def _with_zero_crossings(f: PiecewiseLinearFn) -> tuple[np.ndarray, np.ndarray]:
    b, v = f.breakpoints, f.values
    crossing = v[:-1] * v[1:] < 0
    if not crossing.any():
        return np.array(b), np.array(v)
    idx = np.nonzero(crossing)[0]
    roots = b[idx] - v[idx] * (b[idx + 1] - b[idx]) / (v[idx + 1] - v[idx])
    return np.insert(b, idx + 1, roots), np.insert(v, idx + 1, 0.0)


def abs_part(f: PiecewiseLinearFn) -> PiecewiseLinearFn:
    """``|f|`` exactly, with zero crossings inserted as breakpoints."""
    if np.all(f.values >= 0):
        return f
    b, v = _with_zero_crossings(f)
    return PiecewiseLinearFn(b, np.abs(v))


def norm_l1(f: PiecewiseLinearFn) -> float:
    b, v = _with_zero_crossings(f)
    a = np.abs(v)
    return float(np.sum(0.5 * (a[:-1] + a[1:]) * np.diff(b)))


def norm_w11(f: PiecewiseLinearFn) -> float:
    return norm_l1(f) + derivative(f).norm_l1()


def norm_sup(f: PiecewiseLinearFn) -> float:
    return float(np.max(np.abs(f.values)))


def lipschitz(f: PiecewiseLinearFn) -> float:
    return float(np.max(np.abs(f.slopes)))


# ---- algebra ------------------------------------------------------------
def add(f: PiecewiseLinearFn, g: PiecewiseLinearFn) -> PiecewiseLinearFn:
    xs = np.union1d(f.breakpoints, g.breakpoints)
    vals = np.asarray(f(xs)) + np.asarray(g(xs))
    # the merged end values are sums of zeros but may carry -0.0
    vals[0] = 0.0
    vals[-1] = 0.0
    return PiecewiseLinearFn(xs, vals)


def scale(f: PiecewiseLinearFn, lam: float) -> PiecewiseLinearFn:
    vals = f.values * float(lam)
    vals[0] = 0.0
    vals[-1] = 0.0
    return PiecewiseLinearFn(f.breakpoints, vals)


def translate(f: PiecewiseLinearFn, a: float) -> PiecewiseLinearFn:
    """``x ↦ f(x − a)``."""
    return PiecewiseLinearFn(f.breakpoints + float(a), f.values)


def subtract(f: PiecewiseLinearFn, g: PiecewiseLinearFn) -> PiecewiseLinearFn:
    return add(f, scale(g, -1.0))


def simple_approx(df: StepFunction, eps: float) -> StepFunction:
    """Step approximation ``v`` with ``∥df − v∥₁ ≤ eps`` and no more pieces.

    Adjacent levels are merged greedily into their length-weighted mean when
    they differ by at most ``eps / total_length`` and the accumulated L¹
    error stays within ``eps``.  The support ``[a₁, a_{N+1}]`` never changes.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0 or df.n_pieces <= 1:
        return df
    b, lv = df.breakpoints, df.levels
    lengths = np.diff(b)
    total = float(lengths.sum())
    level_gap = eps / total

    kept_breaks = [float(b[0])]
    kept_levels: list[float] = []
    budget = float(eps)
    start = 0
    for i in range(1, lv.size + 1):
        if i < lv.size and abs(lv[i] - lv[i - 1]) <= level_gap:
            group = slice(start, i + 1)
            mean = float(np.average(lv[group], weights=lengths[group]))
            cost = float(np.sum(np.abs(lv[group] - mean) * lengths[group]))
            if cost <= budget:
                continue
        group = slice(start, i)
        mean = float(np.average(lv[group], weights=lengths[group]))
        budget -= float(np.sum(np.abs(lv[group] - mean) * lengths[group]))
        kept_levels.append(mean)
        kept_breaks.append(float(b[i]))
        start = i

    approx = StepFunction(np.array(kept_breaks), np.array(kept_levels))
    logger.debug(f"simple_approx: {df.n_pieces} -> {approx.n_pieces} pieces (eps={eps})")
    return approx


# ---- named generators ----------------------------------------------------
def zero(a: float = 0.0, b: float = 1.0) -> PiecewiseLinearFn:
    return PiecewiseLinearFn([a, b], [0.0, 0.0])


def tent(center: float = 0.0, half_width: float = 1.0, height: float = 1.0) -> PiecewiseLinearFn:
    return PiecewiseLinearFn(
        [center - half_width, center, center + half_width], [0.0, float(height), 0.0]
    )


def sawtooth(
    teeth: int = 4,
    width: float = 1.0,
    height: float = 1.0,
    start: float = 0.0,
    signed: bool = False,
) -> PiecewiseLinearFn:
    """``teeth`` adjacent triangles of base ``width``; ``signed`` alternates sign."""
    if teeth < 1:
        raise ValueError("teeth must be >= 1")
    xs = start + np.arange(2 * teeth + 1) * (width / 2.0)
    vals = np.zeros_like(xs)
    peaks = np.arange(teeth)
    signs = np.where(peaks % 2 == 1, -1.0, 1.0) if signed else np.ones(teeth)
    vals[1::2] = height * signs
    return PiecewiseLinearFn(xs, vals)


def steps(
    levels: Sequence[float] = (1.0, 2.0, 1.0),
    width: float = 1.0,
    ramp: float = 0.25,
    start: float = 0.0,
) -> PiecewiseLinearFn:
    """Staircase of plateaus joined by linear ramps of width ``ramp``."""
    if ramp <= 0 or width <= 0:
        raise ValueError("width and ramp must be positive")
    xs = [start]
    vals = [0.0]
    x = start
    for level in levels:
        x += ramp
        xs.append(x)
        vals.append(float(level))
        x += width
        xs.append(x)
        vals.append(float(level))
    xs.append(x + ramp)
    vals.append(0.0)
    return PiecewiseLinearFn(xs, vals)


def random_pl(
    n_breaks: int = 8,
    span: float = 3.0,
    amplitude: float = 1.0,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> PiecewiseLinearFn:
    """Random breakpoints in ``[−span, span]`` with Gaussian interior values."""
    if n_breaks < 3:
        raise ValueError("n_breaks must be >= 3")
    rng = rng if rng is not None else np.random.default_rng(seed)
    inner = np.sort(rng.uniform(-span, span, size=n_breaks - 2))
    inner = np.unique(inner)
    xs = np.concatenate(([-span - 0.5], inner, [span + 0.5]))
    vals = np.concatenate(([0.0], amplitude * rng.standard_normal(inner.size), [0.0]))
    return PiecewiseLinearFn(xs, vals)


GENERATORS = {
    "tent": tent,
    "steps": steps,
    "sawtooth": sawtooth,
    "random_pl": random_pl,
}


def from_dict(obj: Mapping[str, Any]) -> PiecewiseLinearFn:
    """Build a function from ``{"breakpoints", "values"}`` or a named generator."""
    if "breakpoints" in obj:
        return PiecewiseLinearFn(obj["breakpoints"], obj["values"])
    kind = obj.get("type")
    if kind not in GENERATORS:
        raise ValueError(f"unknown function type: {kind!r}")
    params = dict(obj.get("params") or {})
    if kind == "random_pl" and "seed" in obj:
        params.setdefault("seed", obj["seed"])
    return GENERATORS[kind](**params)
