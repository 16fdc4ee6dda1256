"""Тесты для медленных оракулов."""

import numpy as np
import pytest

from maxop.bruteforce import (
    dense_ladder_maximal,
    dense_ladder_profile,
    fractional_constant_oracle,
    quadrature_ladder,
    trapezoid_extension,
)
from maxop.funcmodel import zero
from maxop.kernels import analytic_fractional_constant
from maxop.scalespace import extension, maximal_at


class TestOracles:
    """Тесты оракулов против сертифицированного поиска."""

    def test_quadrature_ladder_matches_closed_form(self, signed_sawtooth, poisson, heat, fracpoisson):
        """Тест квадратуры по sinh против замкнутой формулы."""
        ts = np.array([0.01, 0.3, 2.0, 40.0])
        for k in (poisson, heat, fracpoisson):
            for x in (-2.2, 0.1, 5.0):
                oracle = quadrature_ladder(signed_sawtooth, k, x, ts)
                exact = [extension(signed_sawtooth, k, x, t) for t in ts]
                np.testing.assert_allclose(oracle, exact, atol=1e-9)

    def test_trapezoid_rejects_nonpositive_scale(self, tent_fn, poisson):
        """Тест проверки масштаба в правиле трапеций."""
        with pytest.raises(ValueError):
            trapezoid_extension(tent_fn, poisson, 0.0, 0.0)

    def test_zero_function(self, poisson):
        """Тест оракула на нулевой функции."""
        assert dense_ladder_maximal(zero(), poisson, 0.5, n_scales=10) == (0.0, 0.0)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    def test_fractional_constant_oracle(self, alpha):
        """Тест оракула константы C₁^α."""
        assert fractional_constant_oracle(alpha) == pytest.approx(analytic_fractional_constant(alpha), rel=1e-6)

    @pytest.mark.slow
    def test_dense_ladder_matches_maximal(self, signed_sawtooth, poisson, heat, fracpoisson):
        """Тест плотной лестницы масштабов против maximal_at."""
        for k in (poisson, heat, fracpoisson):
            for x in (-3.0, -0.4, 0.75, 4.0):
                oracle, _ = dense_ladder_maximal(signed_sawtooth, k, x)
                value, _ = maximal_at(signed_sawtooth, k, x, tol=1e-8)
                assert abs(oracle - value) <= 1e-5

    @pytest.mark.slow
    def test_dense_ladder_profile(self, tent_fn, heat):
        """Тест профиля оракула на сетке."""
        grid = np.linspace(-2.0, 2.0, 5)
        rows = dense_ladder_profile(tent_fn, heat, grid, n_scales=2000)
        assert len(rows) == 5
        assert rows[2] == (1.0, 0.0)
        for x, (value, _) in zip(grid, rows):
            assert value == pytest.approx(maximal_at(tent_fn, heat, x, tol=1e-8)[0], abs=1e-5)
