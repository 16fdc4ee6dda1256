"""Тесты для семейств ядер."""

import math

import numpy as np
import pytest

from maxop.errors import KernelError
from maxop.kernels import (
    KernelFamily,
    analytic_fractional_constant,
    make_kernel,
    normalize_fractional,
    scaled_value,
    sup_decay_bound,
    tabulate,
)


class TestKernels:
    """Тесты для KernelSpec и make_kernel."""

    def test_normalization_constants(self, poisson, heat):
        """Тест констант нормировки Пуассона и теплового ядра."""
        assert poisson.norm_const == pytest.approx(1.0 / math.pi)
        assert heat.norm_const == pytest.approx(1.0 / math.sqrt(math.pi))

    @pytest.mark.parametrize("family,alpha", [("poisson", None), ("heat", None), ("fracpoisson", 0.3), ("fracpoisson", 0.8)])
    def test_unit_mass(self, family, alpha):
        """Тест единичной массы."""
        k = make_kernel(family, alpha)
        assert abs(k.mass() - 1.0) <= 1e-10

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
    def test_fractional_constant_matches_closed_form(self, alpha):
        """Тест что численная нормировка совпадает с формулой через Γ."""
        assert normalize_fractional(alpha) == pytest.approx(analytic_fractional_constant(alpha), rel=1e-9)

    def test_fractional_alpha_zero_is_poisson(self):
        """Тест что alpha=0 даёт константу Пуассона."""
        assert normalize_fractional(0.0) == pytest.approx(1.0 / math.pi, rel=1e-9)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, None])
    def test_fractional_alpha_out_of_range(self, alpha):
        """Тест что alpha вне (0, 1) отклоняется."""
        with pytest.raises(KernelError):
            make_kernel("fracpoisson", alpha)

    def test_unknown_family(self):
        """Тест неизвестного семейства."""
        with pytest.raises(KernelError):
            make_kernel("gauss")

    def test_radially_nonincreasing(self, poisson, heat, fracpoisson):
        """Тест радиальной монотонности."""
        xs = np.linspace(0.0, 20.0, 201)
        for k in (poisson, heat, fracpoisson):
            vals = np.asarray(k(xs))
            assert np.all(np.diff(vals) <= 0)
            np.testing.assert_allclose(k(-xs), vals)
            assert k.peak == pytest.approx(float(k(0.0)))

    def test_antiderivative_limits(self, poisson, heat, fracpoisson):
        """Тест что Φ₀(∞) = 1/2 для всех семейств."""
        for k in (poisson, heat, fracpoisson):
            assert float(k.antiderivative(np.inf)) == pytest.approx(0.5, abs=1e-10)
            assert float(k.antiderivative(-np.inf)) == pytest.approx(-0.5, abs=1e-10)
            assert float(k.antiderivative(0.0)) == 0.0

    def test_antiderivatives_by_finite_differences(self, poisson, heat, fracpoisson):
        """Тест производных Φ₀ и Φ₁ конечными разностями."""
        z = np.array([-3.0, -0.7, 0.4, 1.5, 6.0])
        h = 1e-5
        for k in (poisson, heat, fracpoisson):
            d0 = (k.antiderivative(z + h) - k.antiderivative(z - h)) / (2 * h)
            d1 = (k.first_moment_antiderivative(z + h) - k.first_moment_antiderivative(z - h)) / (2 * h)
            np.testing.assert_allclose(d0, k(z), rtol=1e-6, atol=1e-10)
            np.testing.assert_allclose(d1, z * k(z), rtol=1e-6, atol=1e-10)

    def test_name(self, poisson, fracpoisson):
        """Тест имён ядер."""
        assert poisson.name == "poisson"
        assert fracpoisson.name == "fracpoisson(alpha=0.5)"
        assert fracpoisson.family is KernelFamily.FRACTIONAL_POISSON

    def test_scaled_value_and_decay_bound(self, poisson):
        """Тест растяжения и оценки сверху."""
        assert scaled_value(poisson, 2.0, 0.0) == pytest.approx(0.5 / math.pi)
        assert sup_decay_bound(poisson, 4.0, 2.0) == pytest.approx(0.5 / math.pi)
        with pytest.raises(ValueError):
            scaled_value(poisson, 0.0, 1.0)
        with pytest.raises(ValueError):
            sup_decay_bound(poisson, -1.0, 1.0)

    def test_tabulate(self, heat):
        """Тест табулирования."""
        rows = tabulate(heat, np.array([-1.0, 0.0, 1.0]))
        assert len(rows) == 3
        assert rows[1] == (0.0, pytest.approx(1.0 / math.sqrt(math.pi)))
        assert rows[0][1] == pytest.approx(rows[2][1])

    def test_fractional_approaches_poisson(self, poisson):
        """Тест что sup|φ^α − φ_Пуассон| убывает при α → 0."""
        xs = np.linspace(-50.0, 50.0, 2001)
        gaps = [float(np.max(np.abs(make_kernel("fracpoisson", a)(xs) - poisson(xs)))) for a in (0.5, 0.2, 0.05, 0.01)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.01

    @pytest.mark.parametrize("t,s", [(0.5, 2.0), (3.0, 0.1), (1.0, 7.0)])
    def test_scaled_value_dilation(self, poisson, heat, fracpoisson, t, s):
        """Тест согласованности растяжений: φ_{st}(sx) = φ_t(x)/s."""
        xs = np.array([-4.0, -0.3, 0.0, 1.1, 9.0])
        for k in (poisson, heat, fracpoisson):
            np.testing.assert_allclose(scaled_value(k, s * t, s * xs), scaled_value(k, t, xs) / s, rtol=1e-12)
            np.testing.assert_allclose(scaled_value(k, t, xs), np.asarray(k(xs / t)) / t, rtol=1e-12)
