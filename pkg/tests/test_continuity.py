"""Тесты для эксперимента непрерывности и проверок вдоль последовательностей."""

import numpy as np
import pytest

from maxop.funcmodel import tent
from maxop.verify.checks import (
    check_convex_limit,
    check_finite_intervals,
    check_pointwise_derivative,
    check_prop5,
    detached_members,
)
from maxop.verify.continuity import continuity_experiment, continuity_report, energy_table, refine
from maxop.verify.reports import FAILED, PASSED
from maxop.verify.sequences import ContinuitySequence

TOL = 1e-6


@pytest.fixture(scope="module")
def tent_experiment(poisson):
    """Полный эксперимент для палатки, ядро Пуассона"""
    seq = ContinuitySequence(tent())
    return seq, continuity_experiment(seq, poisson, tol=TOL, grid_n=160)


class TestRefine:
    """Тесты для измельчения сетки."""

    def test_halves_cells(self):
        """Тест что каждая ячейка делится пополам."""
        fine = refine(np.array([0.0, 1.0, 3.0]))
        np.testing.assert_allclose(fine, [0.0, 0.5, 1.0, 2.0, 3.0])


class TestConstantSequence:
    """Тесты для u_j = u."""

    def test_energy_vanishes(self, tent_fn, poisson):
        """Тест что E_j = 0 для постоянной последовательности."""
        seq = ContinuitySequence.constant(tent_fn, indices=(1, 2, 4))
        res = continuity_experiment(seq, poisson, grid=np.linspace(-3.0, 3.0, 41), tol=TOL, check_refinement=False)
        assert res.report.status == PASSED
        assert [row.j for row in res.rows] == [1, 2, 4]
        for row in res.rows:
            assert row.energy == 0.0
            assert row.sup_gap == 0.0
            assert row.w11_distance == 0.0
        assert res.refinement is None


@pytest.mark.slow
class TestTentContinuity:
    """Тесты аддитивной последовательности для палатки."""

    def test_report_passes(self, tent_experiment):
        """Тест что E_j → 0."""
        _, res = tent_experiment
        assert res.report.status == PASSED
        assert res.report.name == "continuity"
        assert len(res.rows) == 7

    def test_rows_are_consistent(self, tent_experiment):
        """Тест внутренних соотношений строк таблицы."""
        seq, res = tent_experiment
        for row in res.rows:
            assert row.sup_gap <= row.w11_distance + 2 * TOL
            assert row.energy == pytest.approx(row.contact + row.detached, abs=1e-9)
            assert row.contact == pytest.approx(row.contact_contact + row.contact_detached, abs=1e-9)
        energies = [row.energy for row in res.rows]
        assert energies[-1] < energies[0]
        assert energies[-1] <= 0.05 * 2.0

    def test_refinement_recorded(self, tent_experiment):
        """Тест сравнения с сеткой h/2."""
        _, res = tent_experiment
        assert set(res.refinement) == {"h", "h/2", "agree", "finite_intervals", "pointwise_derivative"}
        assert res.refinement["h/2"] >= 0.0
        for name in ("finite_intervals", "pointwise_derivative"):
            assert set(res.refinement[name]) == {"h", "h/2", "agree"}

    def test_metadata_rows(self, tent_experiment):
        """Тест что таблица попадает в метаданные отчёта."""
        _, res = tent_experiment
        rows = res.report.to_dict()["metadata"]["rows"]
        assert [r["j"] for r in rows] == [1, 2, 4, 8, 16, 32, 64]
        assert res.report.to_dict()["metadata"]["mode"] == "additive"

    def test_finite_intervals(self, tent_experiment):
        """Тест ∫_{D_j¹} |(u_j*)′ − (u*)′| → 0."""
        seq, res = tent_experiment
        report = check_finite_intervals(seq.base, seq, res.profiles, res.profile)
        assert not report.failed

    def test_pointwise_derivative(self, tent_experiment):
        """Тест сходимости наклонов на D."""
        seq, res = tent_experiment
        report = check_pointwise_derivative(seq, res.profiles, res.profile)
        assert not report.failed

    def test_prop5(self, tent_experiment):
        """Тест сходимости нормы вариации на отрезке."""
        seq, res = tent_experiment
        report = check_prop5(seq.base, seq, res.profiles, res.profile, interval=(-1.5, 1.5))
        assert not report.failed
        for card in report.metadata["cardinalities"]:
            assert card <= 3 * 4 + 1


@pytest.fixture(scope="module")
def coarse_experiment(poisson):
    """Эксперимент для палатки на грубой сетке без измельчения"""
    seq = ContinuitySequence(tent(), indices=(1, 2, 4, 8))
    res = continuity_experiment(seq, poisson, grid=np.linspace(-3.0, 3.0, 61), tol=TOL, check_refinement=False)
    return seq, res


def growing_ripple(res, start=4):
    """Профили u_j*, к которым с номера start добавлена растущая рябь"""
    out = {}
    for j, p in res.profiles.items():
        if j < start:
            out[j] = p
        else:
            out[j] = p.with_values(p.ustar + 0.05 * j * (1.5 + np.cos(3.0 * p.grid)))
    return out


class TestPlantedViolations:
    """Отрицательные контроли для проверок вдоль последовательностей."""

    def test_continuity_fails_on_ripple(self, coarse_experiment):
        """Тест что растущая рябь в u_j* ломает E_j → 0."""
        seq, res = coarse_experiment
        profiles = growing_ripple(res)
        rows = energy_table(seq, res.profile, profiles, 10 * TOL)
        report = continuity_report(seq, rows, res.profile, 10 * TOL)
        assert report.status == FAILED
        assert rows[-1].energy > rows[1].energy
        assert any("not decreasing" in d for _, d in report.witnesses)

    def test_continuity_report_matches_experiment(self, coarse_experiment):
        """Тест что отчёт из таблицы совпадает с отчётом эксперимента."""
        seq, res = coarse_experiment
        rows = energy_table(seq, res.profile, res.profiles, 10 * TOL)
        report = continuity_report(seq, rows, res.profile, 10 * TOL)
        assert report.to_dict() == res.report.to_dict()

    def test_finite_intervals_fails_on_ripple(self, coarse_experiment):
        """Тест что рябь на D_j¹ даёт провал finite_intervals."""
        seq, res = coarse_experiment
        report = check_finite_intervals(seq.base, seq, growing_ripple(res), res.profile)
        assert report.status == FAILED
        series = report.metadata["series"]
        assert series[-1] > series[1]

    def test_prop5_fails_on_ripple(self, coarse_experiment):
        """Тест что рябь ломает сходимость нормы вариации."""
        seq, res = coarse_experiment
        report = check_prop5(seq.base, seq, growing_ripple(res), res.profile, interval=(-1.5, 1.5))
        assert report.status == FAILED

    def test_convex_members_on_detachment(self, coarse_experiment):
        """Тест сужений u_j* на компоненту D_j вокруг середины компоненты D."""
        seq, res = coarse_experiment
        members, limit = detached_members(seq, res.profiles, res.profile)
        assert limit is not None
        (l, r), w = limit
        assert l < r
        assert w.grid[0] == l and w.grid[-1] == r
        assert 1 <= len(members) <= len(seq)
        for (lj, rj), wj in members:
            assert lj < (l + r) / 2.0 < rj
        report = check_convex_limit(members, limit, slack=4 * TOL, slope_slack=2 * TOL / 0.1)
        assert not any(d.startswith("precondition") for _, d in report.witnesses)
