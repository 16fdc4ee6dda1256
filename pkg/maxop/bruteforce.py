# bruteforce.py
"""Brute-force oracles.

Independent, slow re-implementations used to pin fixtures and to cross-check
the certified search in :mod:`maxop.scalespace`:

* :func:`trapezoid_extension`: dense trapezoid rule over ``supp u``;
* :func:`dense_ladder_maximal`: ``max`` of ``|u|(x)`` and ``ũ(x, t)`` on a
  dense log-spaced scale ladder, every ``ũ`` computed by composite
  Gauss–Legendre quadrature after the substitution ``z = sinh s`` (smooth for
  all three kernels, no use of the closed-form antiderivatives);
* :func:`fractional_constant_oracle`: trapezoid in ``s`` over ``[−10⁶, 10⁶]``
  with the leading power-tail correction.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .funcmodel import PiecewiseLinearFn, abs_part
from .kernels import KernelFamily, KernelSpec

logger = logging.getLogger(__name__)

TRAPEZOID_NODES = 1_000_000
LADDER_SCALES = 10_000
GL_NODES = 8
GL_PANELS = 24
SCALE_CHUNK = 250


def trapezoid_extension(
    u: PiecewiseLinearFn,
    k: KernelSpec,
    x: float,
    t: float,
    nodes: int = TRAPEZOID_NODES,
) -> float:
    """``ũ(x, t)`` by the trapezoid rule on ``nodes`` equispaced points of ``supp u``."""
    if t <= 0:
        raise ValueError("scale must be positive")
    a = abs_part(u)
    lo, hi = a.support
    ys = np.linspace(lo, hi, nodes)
    vals = np.asarray(a(ys)) * np.asarray(k((x - ys) / t)) / t
    return float(np.trapezoid(vals, ys)) if hasattr(np, "trapezoid") else float(np.trapz(vals, ys))


def _segments(u: PiecewiseLinearFn) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    a = abs_part(u)
    b, v = a.breakpoints, a.values
    keep = (v[:-1] != 0) | (v[1:] != 0)
    return b[:-1][keep], b[1:][keep], v[:-1][keep], v[1:][keep]


def _gl_panels(n_panels: int = GL_PANELS, n_nodes: int = GL_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes/weights of a composite rule on ``[0, 1]``."""
    x, w = leggauss(n_nodes)
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def quadrature_ladder(u: PiecewiseLinearFn, k: KernelSpec, x: float, ts: np.ndarray) -> np.ndarray:
    """``ũ(x, t)`` for every ``t`` in ``ts`` by composite Gauss–Legendre in ``s``.

    On a segment ``[p, q]`` the substitution ``y = x − t·sinh s`` turns the
    integral into ``∫ |u|(x − t sinh s) φ(sinh s) cosh s ds`` over
    ``[asinh((x−q)/t), asinh((x−p)/t)]``.  For the heat kernel the window is
    clipped to ``|sinh s| ≤ 7`` where ``e^{−z²}`` is below ``10^{−21}``.
    """
    ts = np.asarray(ts, dtype=float)
    p, q, vp, vq = _segments(u)
    if p.size == 0:
        return np.zeros_like(ts)
    nodes, weights = _gl_panels()
    window = math.asinh(7.0) if k.family is KernelFamily.HEAT else math.inf
    slope = ((vq - vp) / (q - p))[None, :, None]
    p, q, vp = p[None, :, None], q[None, :, None], vp[None, :, None]
    out = np.zeros(ts.size)
    for start in range(0, ts.size, SCALE_CHUNK):
        t = ts[start:start + SCALE_CHUNK][:, None, None]
        s_lo = np.maximum(np.arcsinh((x - q) / t), -window)
        s_hi = np.minimum(np.arcsinh((x - p) / t), window)
        span = np.maximum(s_hi - s_lo, 0.0)
        s = s_lo + span * nodes[None, None, :]
        z = np.sinh(s)
        y = x - t * z
        uy = vp + slope * (y - p)
        integrand = uy * np.asarray(k(z)) * np.cosh(s)
        out[start:start + SCALE_CHUNK] = np.sum(span[..., 0] * (integrand @ weights), axis=1)
    return out


def dense_ladder_maximal(
    u: PiecewiseLinearFn,
    k: KernelSpec,
    x: float,
    n_scales: int = LADDER_SCALES,
    t_range: Optional[Tuple[float, float]] = None,
) -> Tuple[float, float]:
    """Oracle ``(u*(x), t)`` from ``n_scales`` log-spaced scales plus the ``t = 0`` endpoint."""
    a = abs_part(u)
    ux = float(a(x))
    if a.is_zero():
        return 0.0, 0.0
    if t_range is None:
        resolution = float(np.min(np.diff(a.breakpoints)))
        t_range = (1e-4 * resolution, 100.0 * (a.support_radius + abs(x) + 1.0))
    ts = np.geomspace(t_range[0], t_range[1], n_scales)
    vals = quadrature_ladder(a, k, float(x), ts)
    i = int(np.argmax(vals))
    if vals[i] > ux:
        return float(vals[i]), float(ts[i])
    return ux, 0.0


def dense_ladder_profile(
    u: PiecewiseLinearFn,
    k: KernelSpec,
    grid: Iterable[float],
    n_scales: int = LADDER_SCALES,
) -> List[Tuple[float, float]]:
    rows = [dense_ladder_maximal(u, k, float(x), n_scales) for x in grid]
    logger.debug(f"dense ladder oracle: {len(rows)} points x {n_scales} scales ({k.name})")
    return rows


def fractional_constant_oracle(alpha: float, cutoff: float = 1.0e6, nodes: int = 400_001) -> float:
    """``C₁^α`` by the trapezoid rule in ``s = asinh x`` on ``[−cutoff, cutoff]``."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    expo = (2.0 - alpha) / 2.0
    s = np.linspace(0.0, math.asinh(cutoff), nodes)
    # (1 + sinh²)^(-expo) · cosh = cosh^(1 - 2·expo)
    vals = np.cosh(s) ** (1.0 - 2.0 * expo)
    h = s[1] - s[0]
    half = h * (np.sum(vals) - 0.5 * (vals[0] + vals[-1]))
    tail = cutoff ** (alpha - 1.0) / (1.0 - alpha)
    return 1.0 / (2.0 * (half + tail))
