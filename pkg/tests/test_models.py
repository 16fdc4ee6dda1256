"""Тесты для журнала запусков в базе данных."""

import math

from maxop.models import PropertyReportRecord, Run, open_ledger, record_reports
from maxop.verify.reports import INCONCLUSIVE, make_report
from maxop.verify.suites import SuiteResult


def _results():
    return [
        SuiteResult("f00-tent", "poisson", make_report("uniform_bound", 0.1, 0.2, 0.0)),
        SuiteResult("f00-tent", "poisson", make_report("tail_bound", 0.0, math.inf, 0.0)),
        SuiteResult("f01-sawtooth", "heat", make_report("transfer_identity", 1.0, 0.0, 0.0, status=INCONCLUSIVE)),
    ]


class TestLedger:
    """Тесты для record_reports."""

    def test_records_reports(self, test_db):
        """Тест записи отчётов, привязанных к запуску."""
        run = Run(command="verify", kernel="poisson", suite="all", seed=7, tol=1e-5, config={"tol": 1e-5})
        test_db.add(run)
        results = _results()
        n = record_reports(test_db, run, results, paths={results[0].key: "reports/uniform.json"})
        test_db.commit()
        assert n == 3
        rows = test_db.query(PropertyReportRecord).order_by(PropertyReportRecord.name).all()
        assert [r.name for r in rows] == ["tail_bound", "transfer_identity", "uniform_bound"]
        assert all(r.run_id == run.id for r in rows)

    def test_non_finite_and_status(self, test_db):
        """Тест хранения бесконечностей как NULL и статуса."""
        run = Run(command="verify", kernel="poisson", seed=7, tol=1e-5)
        test_db.add(run)
        record_reports(test_db, run, _results())
        test_db.commit()
        tail = test_db.query(PropertyReportRecord).filter_by(name="tail_bound").one()
        assert tail.rhs is None
        assert tail.report_path is None
        transfer = test_db.query(PropertyReportRecord).filter_by(name="transfer_identity").one()
        assert transfer.status == "inconclusive"
        assert transfer.passed is True
        assert len(run.reports) == 3

    def test_open_ledger(self, tmp_path):
        """Тест создания таблиц в файле SQLite."""
        session = open_ledger(f"sqlite:///{tmp_path / 'ledger.db'}")
        session.add(Run(command="kernel", kernel="heat", seed=1, tol=1e-5))
        session.commit()
        assert session.query(Run).count() == 1
        session.close()
