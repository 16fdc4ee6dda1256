"""Тесты для отчётов и интегралов конечных разностей."""

import json
import logging
import math

import numpy as np
import pytest

from maxop.funcmodel import tent
from maxop.verify.reports import (
    FAILED,
    INCONCLUSIVE,
    NOT_APPLICABLE,
    PASSED,
    RECORDED,
    cells_in,
    derivative_gap_integral,
    exact_derivative_integral,
    fd_slack,
    make_report,
    tends_to_zero,
)


class TestMakeReport:
    """Тесты для make_report."""

    def test_inequality_verdict(self):
        """Тест вердикта lhs ≤ rhs + slack."""
        ok = make_report("demo", lhs=1.0, rhs=0.9, slack=0.2)
        assert ok.status == PASSED and ok.passed and not ok.witnesses
        bad = make_report("demo", lhs=1.0, rhs=0.5, slack=0.1)
        assert bad.status == FAILED and not bad.passed
        assert bad.witnesses

    def test_witnesses_force_failure(self):
        """Тест что непустые свидетели означают провал."""
        rep = make_report("demo", lhs=0.0, rhs=1.0, slack=0.0, witnesses=[(0.5, "bump")])
        assert rep.failed
        assert rep.witnesses == [(0.5, "bump")]

    @pytest.mark.parametrize("status", [INCONCLUSIVE, NOT_APPLICABLE, RECORDED])
    def test_non_failing_statuses(self, status):
        """Тест статусов, которые не считаются провалом."""
        rep = make_report("demo", lhs=5.0, rhs=0.0, slack=0.0, witnesses=[(1.0, "ignored")], status=status)
        assert rep.passed
        assert rep.witnesses == []
        assert rep.status == status

    def test_unknown_status(self):
        """Тест неизвестного статуса."""
        with pytest.raises(ValueError):
            make_report("demo", 0.0, 0.0, 0.0, status="skipped")

    def test_inconclusive_logs_warning(self, caplog):
        """Тест предупреждения в журнале для inconclusive."""
        with caplog.at_level(logging.WARNING):
            make_report("demo", 0.0, 0.0, 0.0, metadata={"reason": "margin"}, status=INCONCLUSIVE)
        assert "inconclusive" in caplog.text
        assert "margin" in caplog.text

    def test_to_dict_encodes_non_finite(self):
        """Тест кодирования ±inf и nan."""
        rep = make_report(
            "demo", lhs=0.0, rhs=math.inf, slack=0.0, metadata={"edge": -math.inf, "values": np.array([1.0, math.nan])}
        )
        data = rep.to_dict()
        assert data["rhs"] == "inf"
        assert data["metadata"]["edge"] == "-inf"
        assert data["metadata"]["values"] == [1.0, "nan"]
        json.dumps(data, allow_nan=False)


class TestTendsToZero:
    """Тесты для критерия сходимости к нулю."""

    def test_decreasing_tail(self):
        """Тест убывающего хвоста ниже порога."""
        ok, _ = tends_to_zero([1.0, 0.5, 0.1, 0.02, 0.01], scale=1.0, slack=0.0)
        assert ok

    def test_within_slack(self):
        """Тест последовательности в пределах допуска."""
        ok, reason = tends_to_zero([1e-9, 2e-9, 1e-9], scale=1.0, slack=1e-8)
        assert ok and "slack" in reason

    def test_final_too_large(self):
        """Тест большого последнего значения."""
        ok, reason = tends_to_zero([1.0, 0.9, 0.8], scale=1.0, slack=0.0)
        assert not ok and "above" in reason

    def test_tail_increasing(self):
        """Тест возрастающего хвоста."""
        ok, reason = tends_to_zero([0.01, 0.001, 0.02], scale=1.0, slack=0.0)
        assert not ok and "not decreasing" in reason


class TestFiniteDifferences:
    """Тесты для интегралов производных."""

    def test_sampled_tent_variation(self):
        """Тест ∫|w′| для выборки палатки."""
        grid = np.linspace(-2.0, 2.0, 41)
        values = np.asarray(tent()(grid))
        assert derivative_gap_integral(grid, values) == pytest.approx(2.0)
        assert derivative_gap_integral(grid, values, [(0.0, math.inf)]) == pytest.approx(1.0)
        assert derivative_gap_integral(grid, values, minus=tent()) == pytest.approx(0.0, abs=1e-12)

    def test_offset(self):
        """Тест ∫|w′ − c| на отрезке."""
        grid = np.linspace(0.0, 1.0, 11)
        assert derivative_gap_integral(grid, grid.copy(), offset=1.0) == pytest.approx(0.0, abs=1e-12)
        assert derivative_gap_integral(grid, np.zeros(11), offset=2.0) == pytest.approx(2.0)

    def test_exact_integral(self):
        """Тест точного интеграла для кусочно-линейной функции."""
        u = tent()
        assert exact_derivative_integral(u, [(-math.inf, math.inf)]) == pytest.approx(2.0)
        assert exact_derivative_integral(u, [(-0.5, 0.5)], offset=1.0) == pytest.approx(1.0)
        assert exact_derivative_integral(u, [(1.0, 3.0)], offset=1.0) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            exact_derivative_integral(u, [(1.0, math.inf)], offset=1.0)

    def test_slack_helpers(self):
        """Тест допуска конечных разностей."""
        grid = np.linspace(0.0, 1.0, 11)
        assert cells_in(grid, None) == 12
        assert fd_slack(1e-6, 0) == pytest.approx(2e-6)
        assert fd_slack(1e-6, 10) == pytest.approx(2e-5)
