"""Тесты для вариаций и переноса разбиений."""

import math

import numpy as np
import pytest

from maxop.errors import BracketError, InconclusiveTransfer, MaxopError
from maxop.funcmodel import abs_part, sawtooth
from maxop.scalespace import MaximalProfile
from maxop.variation import (
    CoarseGridError,
    Partition,
    SampledFunction,
    alternating_reduction,
    alternating_points,
    extremal_partition,
    sampled_variation,
    total_variation,
    transfer_identity_gap,
    transfer_partition,
    var_over_partition,
)


@pytest.fixture
def saw():
    """Пила из трёх зубцов с изломами через 0.5"""
    return sawtooth(teeth=3, width=1.0, start=0.0)


@pytest.fixture
def saw_profile(saw, poisson):
    """Профиль с u* = |u| в точках изломов"""
    grid = np.linspace(0.0, 3.0, 7)
    return MaximalProfile(grid, np.asarray(abs_part(saw)(grid)), np.zeros(7), 1e-6, poisson)


def lowered_minima(saw, level=0.3, at=(1.0, 2.0)):
    """u*, поднятая до level во внутренних минимумах"""
    def ustar(x):
        return level if x in at else float(abs_part(saw)(x))
    return ustar


class TestVariation:
    """Тесты для Var(w, P) и полной вариации."""

    def test_total_variation_of_tent(self, tent_fn):
        """Тест полной вариации палатки на ℝ и на полуоси."""
        assert total_variation(tent_fn) == pytest.approx(2.0)
        assert total_variation(tent_fn, 0.0, math.inf) == pytest.approx(1.0)
        assert total_variation(tent_fn, -0.5, 0.5) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            total_variation(tent_fn, 1.0, 0.0)

    def test_breakpoint_partition_attains_total_variation(self, signed_sawtooth):
        """Тест что разбиение по изломам даёт полную вариацию."""
        P = Partition(signed_sawtooth.breakpoints)
        assert var_over_partition(signed_sawtooth, P) == pytest.approx(total_variation(signed_sawtooth))

    def test_single_point_partition(self, tent_fn):
        """Тест вырожденного разбиения."""
        assert var_over_partition(tent_fn, Partition([0.0])) == 0.0
        with pytest.raises(ValueError):
            Partition([1.0, 0.0])

    def test_partition_helpers(self):
        """Тест концов и объединения разбиений."""
        P = Partition([0.0, 0.5, 1.0])
        assert P.endpoints.to_list() == [0.0, 1.0]
        assert P.union(Partition([0.25, 2.0])).to_list() == [0.0, 0.25, 0.5, 1.0, 2.0]

    def test_alternating_points(self):
        """Тест выбора точек смены монотонности."""
        assert alternating_points(np.array([0.0, 1.0, 2.0, 1.0, 0.0, 1.0])).tolist() == [0, 2, 4, 5]
        assert alternating_points(np.array([0.0, 1.0])).tolist() == [0, 1]
        assert alternating_points(np.array([0.0, 1.0, 0.99, 2.0]), min_rise=0.05).tolist() == [0, 3]

    def test_extremal_partition(self, saw):
        """Тест экстремального разбиения выборки."""
        w = SampledFunction.of(saw, np.linspace(0.0, 3.0, 31))
        P = extremal_partition(w, 0.0, 3.0, eps=1e-9)
        assert P.to_list() == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
        assert var_over_partition(w, P) == pytest.approx(sampled_variation(w))

    def test_extremal_partition_coarse_grid(self, saw):
        """Тест ошибки на слишком грубой сетке."""
        w = SampledFunction.of(saw, np.linspace(0.0, 3.0, 4))
        with pytest.raises(CoarseGridError):
            extremal_partition(w, 0.0, 0.9, eps=1e-9)


class TestTransferPartition:
    """Тесты для transfer_partition."""

    def test_contact_returns_interior(self, saw, saw_profile):
        """Тест что при u* = |u| перенос оставляет точки на месте."""
        Pi = Partition(np.arange(0.0, 3.01, 0.5))
        star = transfer_partition(saw, saw_profile, Pi, (0.0, 3.0))
        assert star.to_list() == pytest.approx([0.5, 1.0, 1.5, 2.0, 2.5])

    def test_lowered_minima(self, saw, saw_profile):
        """Тест переноса, когда минимумы u* выше |u|."""
        Pi = Partition(np.arange(0.0, 3.01, 0.5))
        ustar = lowered_minima(saw)
        star = transfer_partition(saw, saw_profile, Pi, (0.0, 3.0), ustar=ustar)
        assert star.to_list() == pytest.approx([0.5, 1.15, 1.5, 2.15, 2.5])
        inner = Partition(Pi.points[1:-1])
        lhs, rhs = transfer_identity_gap(saw, star, inner, ustar)
        assert lhs == pytest.approx(2.8)
        assert rhs == pytest.approx(2.8)

    def test_unreachable_maximum(self, saw, saw_profile):
        """Тест BracketError, когда |u| не достигает u*(a_k)."""
        Pi = Partition(np.arange(0.0, 3.01, 0.5))
        base = lowered_minima(saw)

        def ustar(x):
            return 1.5 if x == 0.5 else base(x)

        with pytest.raises(BracketError):
            transfer_partition(saw, saw_profile, Pi, (0.0, 3.0), ustar=ustar)

    def test_within_margin_is_inconclusive(self, saw, saw_profile):
        """Тест InconclusiveTransfer в пределах погрешности профиля."""
        Pi = Partition(np.arange(0.0, 3.01, 0.5))
        base = lowered_minima(saw)

        def ustar(x):
            return 1.0 + 1e-6 if x == 0.5 else base(x)

        with pytest.raises(InconclusiveTransfer):
            transfer_partition(saw, saw_profile, Pi, (0.0, 3.0), ustar=ustar)

    def test_short_partition_unchanged(self, saw, saw_profile):
        """Тест что при n ≤ 2 внутренние точки возвращаются без изменений."""
        star = transfer_partition(saw, saw_profile, Partition([0.0, 0.5, 1.0]), (0.0, 1.0))
        assert star.to_list() == [0.5]
        with pytest.raises(ValueError):
            transfer_partition(saw, saw_profile, Partition([0.0, 1.0]), (0.0, 1.0))

    def test_monotone_points_are_thinned(self, saw, saw_profile):
        """Тест что точки на монотонных участках u* отбрасываются до переноса."""
        Pi = Partition([0.0, 0.25, 0.5, 1.0, 1.5, 1.75, 2.0, 2.5, 3.0])
        ustar = lowered_minima(saw)
        pts, levels = alternating_reduction(Pi, (0.0, 3.0), ustar)
        assert pts.tolist() == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
        assert np.all(np.diff(np.sign(np.diff(levels))) != 0)
        star = transfer_partition(saw, saw_profile, Pi, (0.0, 3.0), ustar=ustar)
        assert star.to_list() == pytest.approx([0.5, 1.15, 1.5, 2.15, 2.5])

    def test_thinning_keeps_variation(self, saw):
        """Тест что прореживание не меняет вариацию u* по разбиению."""
        Pi = Partition([0.0, 0.1, 0.25, 0.5, 0.8, 1.0, 1.5, 3.0])
        ustar = lowered_minima(saw)
        pts, _ = alternating_reduction(Pi, (0.0, 3.0), ustar)
        assert var_over_partition(ustar, Partition(pts)) == pytest.approx(var_over_partition(ustar, Pi))

    def test_constant_cell_kept(self):
        """Тест что на постоянной u* точки не прореживаются."""
        pts, levels = alternating_reduction(Partition([0.0, 0.5, 1.0]), (0.0, 1.0), lambda x: 2.0)
        assert pts.tolist() == [0.0, 0.5, 1.0]
        assert levels.tolist() == [2.0, 2.0, 2.0]

    def test_non_alternating_is_bracket_error(self, saw, saw_profile):
        """Тест что монотонная u* на ячейке даёт ошибку пакета, а не голый ValueError."""
        with pytest.raises(MaxopError):
            transfer_partition(saw, saw_profile, Partition([0.0, 0.2, 0.4, 0.5]), (0.0, 0.5), ustar=lambda x: x)


class TestRefinement:
    """Тесты монотонности вариации при измельчении разбиения."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_refinement_does_not_decrease_variation(self, seed):
        """Тест Var(w, P) ≤ Var(w, P ∪ Q) и предела total_variation."""
        rng = np.random.default_rng(seed)
        w = abs_part(sawtooth(teeth=5, width=0.8, start=-2.0, signed=True))
        P = Partition(np.sort(rng.uniform(-2.5, 2.5, size=6)))
        previous = var_over_partition(w, P)
        for _ in range(4):
            P = P.union(Partition(rng.uniform(-2.5, 2.5, size=8)))
            current = var_over_partition(w, P)
            assert current >= previous - 1e-12
            previous = current
        assert previous <= total_variation(w) + 1e-12
