# kernels.py
"""Admissible convolution kernels in dimension one.

Three families are supported, each radially nonincreasing with unit mass:

* Poisson            ``φ₁(x) = 1/π · (1 + x²)^{-1}``
* Heat               ``φ₂(x) = c · e^{-x²}`` with ``c = (∫ e^{-x²})^{-1}``
* Fractional Poisson ``φ₃^α(x) = C₁^α · (1 + x²)^{-(2-α)/2}``, ``0 < α < 1``

The heat constant is renormalized to unit mass instead of taken from the
``(4π)^{-1/2}`` prefactor, which integrates to ``1/2`` in one dimension.
Dilations follow ``φ_t(x) = φ(x/t)/t``.

Masses are verified at construction by quadrature over a finite window plus
an analytic tail (Gaussian ``erfc`` tail, or the binomial series of the power
tail).  The closed-form antiderivatives ``Φ₀(z) = ∫₀^z φ`` and
``Φ₁(z) = ∫₀^z yφ(y) dy`` feed the exact extension evaluator in
:mod:`maxop.scalespace`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import integrate, special

from .errors import KernelError, QuadratureError

logger = logging.getLogger(__name__)

MASS_TOLERANCE = 1e-10
QUAD_WINDOW = 1.0e3
_TAIL_TERMS = 12


class KernelFamily(str, Enum):
    POISSON = "poisson"
    HEAT = "heat"
    FRACTIONAL_POISSON = "fracpoisson"


def _power_exponent(alpha: float) -> float:
    """``s`` in ``(1 + x²)^{-s}``; ``s = 1`` is the Poisson kernel."""
    return (2.0 - alpha) / 2.0


def _power_tail(s: float, x0: float, terms: int = _TAIL_TERMS) -> Tuple[float, float]:
    """``∫_{x0}^∞ (1 + x²)^{-s} dx`` by the binomial series in ``x^{-2}``.

    Returns ``(value, error_bound)``.  For ``x0 > 1`` the series
    ``Σ binom(-s, k) x0^{1-2s-2k} / (2s+2k-1)`` alternates with decreasing
    terms, so the first omitted term bounds the error.
    """
    if x0 <= 1.0:
        raise ValueError("tail series needs x0 > 1")
    total = 0.0
    coeff = 1.0
    term = 0.0
    for k in range(terms + 1):
        if k > 0:
            coeff *= (-s - (k - 1)) / k
        term = coeff * x0 ** (1.0 - 2.0 * s - 2.0 * k) / (2.0 * s + 2.0 * k - 1.0)
        if k == terms:
            break
        total += term
    return total, abs(term)


def _half_line_quad(fn, x0: float, tol: float) -> Tuple[float, float]:
    points = [p for p in (1.0, 10.0, 100.0) if p < x0]
    value, err = integrate.quad(fn, 0.0, x0, epsabs=tol / 4, epsrel=1e-12, limit=400, points=points)
    return float(value), float(err)


def normalize_fractional(alpha: float, tol: float = MASS_TOLERANCE) -> float:
    """``C₁^α = (∫ (1 + x²)^{-(2-α)/2} dx)^{-1}`` by quadrature with an analytic tail.

    ``alpha = 0`` is accepted as the Poisson limit (returns ``1/π``).
    """
    if not 0.0 <= alpha < 1.0:
        raise KernelError(f"alpha must lie in [0, 1) for normalization, got {alpha!r}")
    s = _power_exponent(alpha)
    body, body_err = _half_line_quad(lambda x: (1.0 + x * x) ** (-s), QUAD_WINDOW, tol)
    tail, tail_err = _power_tail(s, QUAD_WINDOW)
    mass = 2.0 * (body + tail)
    achieved = 2.0 * (body_err + tail_err) / (mass * mass)
    if achieved > tol:
        raise QuadratureError(f"fractional normalization for alpha={alpha}", achieved)
    return 1.0 / mass


def analytic_fractional_constant(alpha: float) -> float:
    """Closed form ``Γ(1 − α/2) / (√π Γ((1 − α)/2))``, for cross-checking."""
    s = _power_exponent(alpha)
    return math.exp(special.gammaln(s) - 0.5 * math.log(math.pi) - special.gammaln(s - 0.5))


@dataclass(frozen=True)
class KernelSpec:
    """One kernel family with its normalization constant; ``dimension`` is fixed to 1."""

    family: KernelFamily
    norm_const: float
    alpha: Optional[float] = None
    dimension: int = 1

    @property
    def name(self) -> str:
        if self.family is KernelFamily.FRACTIONAL_POISSON:
            return f"{self.family.value}(alpha={self.alpha})"
        return self.family.value

    @property
    def exponent(self) -> float:
        if self.family is KernelFamily.POISSON:
            return 1.0
        if self.family is KernelFamily.FRACTIONAL_POISSON:
            return _power_exponent(float(self.alpha))
        raise KernelError("heat kernel has no power exponent")

    # ---- pointwise ----------------------------------------------------
    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        xs = np.asarray(x, dtype=float)
        if self.family is KernelFamily.HEAT:
            out = self.norm_const * np.exp(-xs * xs)
        else:
            out = self.norm_const * (1.0 + xs * xs) ** (-self.exponent)
        return float(out) if out.ndim == 0 else out

    @property
    def peak(self) -> float:
        """``φ(0) = ∥φ∥_∞``."""
        return float(self.norm_const)

    # ---- closed-form antiderivatives ------------------------------------
    def antiderivative(self, z: Union[float, np.ndarray]) -> np.ndarray:
        """``Φ₀(z) = ∫₀^z φ(y) dy`` (odd in ``z``)."""
        zs = np.asarray(z, dtype=float)
        if self.family is KernelFamily.POISSON:
            return self.norm_const * np.arctan(zs)
        if self.family is KernelFamily.HEAT:
            return self.norm_const * (math.sqrt(math.pi) / 2.0) * special.erf(zs)
        s = self.exponent
        z2 = zs * zs
        ratio = np.where(np.isinf(z2), 1.0, z2 / (1.0 + z2))
        half_mass = 0.5 * special.beta(0.5, s - 0.5)
        return np.sign(zs) * self.norm_const * half_mass * special.betainc(0.5, s - 0.5, ratio)

    def first_moment_antiderivative(self, z: Union[float, np.ndarray]) -> np.ndarray:
        """``Φ₁(z) = ∫₀^z y φ(y) dy`` (even in ``z``)."""
        zs = np.asarray(z, dtype=float)
        if self.family is KernelFamily.POISSON:
            return self.norm_const * 0.5 * np.log1p(zs * zs)
        if self.family is KernelFamily.HEAT:
            return self.norm_const * 0.5 * -np.expm1(-zs * zs)
        half_alpha = 1.0 - self.exponent
        return self.norm_const * np.expm1(half_alpha * np.log1p(zs * zs)) / (2.0 * half_alpha)

    # ---- mass -----------------------------------------------------------
    def mass(self, tol: float = MASS_TOLERANCE) -> float:
        """Total mass by quadrature on ``[0, X]`` plus an analytic tail."""
        if self.family is KernelFamily.HEAT:
            body, _ = _half_line_quad(lambda x: float(self(x)), 10.0, tol)
            tail = self.norm_const * (math.sqrt(math.pi) / 2.0) * special.erfc(10.0)
        else:
            body, _ = _half_line_quad(lambda x: float(self(x)), QUAD_WINDOW, tol)
            tail = self.norm_const * _power_tail(self.exponent, QUAD_WINDOW)[0]
        return 2.0 * (body + tail)


def make_kernel(family: Union[str, KernelFamily], alpha: Optional[float] = None) -> KernelSpec:
    """Construct a unit-mass kernel, verifying the mass by quadrature."""
    try:
        fam = KernelFamily(family)
    except ValueError:
        raise KernelError(f"unknown kernel family: {family!r}") from None

    if fam is KernelFamily.FRACTIONAL_POISSON:
        if alpha is None or not 0.0 < float(alpha) < 1.0:
            raise KernelError(f"alpha must lie in (0, 1), got {alpha!r}")
        kernel = KernelSpec(fam, normalize_fractional(float(alpha)), alpha=float(alpha))
    elif fam is KernelFamily.POISSON:
        kernel = KernelSpec(fam, 1.0 / math.pi)
    else:
        # reciprocal of ∫ e^{-x²} dx = √π
        kernel = KernelSpec(fam, 1.0 / math.sqrt(math.pi))

    mass = kernel.mass()
    if abs(mass - 1.0) > MASS_TOLERANCE:
        raise KernelError(f"{kernel.name}: mass check failed, ∫φ = {mass!r}")
    logger.debug(f"kernel {kernel.name}: norm_const={kernel.norm_const!r}, mass={mass!r}")
    return kernel


def scaled_value(k: KernelSpec, t: float, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """``φ_t(x) = φ(x/t)/t``."""
    if t <= 0:
        raise ValueError(f"scale must be positive, got {t!r}")
    out = np.asarray(k(np.asarray(x, dtype=float) / t)) / t
    return float(out) if out.ndim == 0 else out


def sup_decay_bound(k: KernelSpec, t: float, l1: float) -> float:
    """Uniform bound ``φ(0)·∥u∥₁/t ≥ ũ(x, t)`` for every ``x``."""
    if t <= 0:
        raise ValueError(f"scale must be positive, got {t!r}")
    if l1 < 0:
        raise ValueError("l1 norm must be nonnegative")
    return k.peak * l1 / t


def tabulate(k: KernelSpec, xs: np.ndarray) -> List[Tuple[float, float]]:
    values = np.asarray(k(xs))
    return [(float(x), float(v)) for x, v in zip(xs, values)]
