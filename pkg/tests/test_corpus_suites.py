"""Тесты для корпуса функций и прогонов наборов проверок."""

import pytest

from maxop.corpus import KINDS, generate_corpus
from maxop.funcmodel import norm_w11
from maxop.verify.reports import make_report
from maxop.verify.suites import SuiteResult, SuiteRunner, all_passed


@pytest.fixture(scope="module")
def small_runner(poisson):
    """SuiteRunner на корпусе из двух функций"""
    return SuiteRunner(
        corpus=generate_corpus(7, 2),
        kernels=[poisson],
        tol=1e-5,
        grid_n=64,
        indices=(1, 2, 4, 8),
        uniform_pairs=2,
    )


class TestCorpus:
    """Тесты для generate_corpus."""

    def test_deterministic(self):
        """Тест воспроизводимости по seed."""
        a, b = generate_corpus(3, 8), generate_corpus(3, 8)
        assert [e.fid for e in a] == [e.fid for e in b]
        for x, y in zip(a, b):
            assert x.fn.allclose(y.fn)
            assert x.params == y.params

    def test_normalized_and_cycled(self):
        """Тест нормировки ∥·∥_{1,1} = 1 и чередования типов."""
        corpus = generate_corpus(7, 8)
        assert [e.kind for e in corpus] == list(KINDS) * 2
        assert corpus[0].fid == "f00-tent"
        for e in corpus:
            assert norm_w11(e.fn) == pytest.approx(1.0)

    def test_second_entry_is_signed(self):
        """Тест что вторая функция знакопеременна."""
        e = generate_corpus(11, 2)[1]
        assert e.params["signed"] is True
        assert e.fn.values.min() < 0

    def test_to_dict(self):
        """Тест сериализации записи корпуса."""
        data = generate_corpus(7, 1)[0].to_dict()
        assert data["id"] == "f00-tent"
        assert data["type"] == "tent"
        assert set(data) >= {"breakpoints", "values", "params"}

    def test_size_must_be_positive(self):
        """Тест недопустимого размера."""
        with pytest.raises(ValueError):
            generate_corpus(7, 0)


class TestSuiteRunner:
    """Тесты для SuiteRunner."""

    def test_subharmonicity_suite(self, small_runner):
        """Тест набора subharmonicity."""
        results = small_runner.run("subharmonicity")
        assert [r.function_id for r in results] == ["f00-tent", "f01-sawtooth"]
        assert all(r.kernel == "poisson" for r in results)
        assert all_passed(results)

    def test_variation_suite(self, small_runner):
        """Тест набора variation."""
        results = small_runner.run("variation")
        assert len(results) == 2
        assert all(r.report.name == "variation_diminishing" for r in results)
        assert all_passed(results)

    def test_abs_suite(self, small_runner):
        """Тест набора abs в двух режимах."""
        results = small_runner.run("abs")
        assert len(results) == 4
        assert {r.report.name for r in results} == {"abs_convergence[additive]", "abs_convergence[jitter]"}
        assert all(r.kernel == "-" for r in results)
        assert all_passed(results)

    def test_uniform_suite(self, small_runner):
        """Тест набора uniform на двух парах."""
        results = small_runner.run("uniform")
        assert len(results) == 2
        assert all(r.function_id.startswith("pair") for r in results)
        assert all_passed(results)

    def test_threads_keep_order(self, poisson):
        """Тест что пул потоков не меняет порядок и значения."""
        kwargs = dict(corpus=generate_corpus(7, 2), kernels=[poisson], tol=1e-5, grid_n=64)
        serial = SuiteRunner(threads=1, **kwargs).run("variation")
        pooled = SuiteRunner(threads=2, **kwargs).run("variation")
        assert [r.key for r in pooled] == sorted(r.key for r in serial)
        assert [r.report.lhs for r in pooled] == [r.report.lhs for r in serial]

    @pytest.mark.slow
    def test_transfer_suite_on_seeded_sawtooths(self, poisson, heat, fracpoisson):
        """Тест набора transfer: все 10 пил на трёх ядрах без исключений и нарушений."""
        runner = SuiteRunner(corpus=generate_corpus(7, 2), kernels=[poisson, heat, fracpoisson], tol=1e-5, grid_n=64)
        results = runner.run("transfer")
        assert len(results) == 30
        assert {r.report.name for r in results} == {"transfer_identity"}
        assert all(r.report.status in ("passed", "inconclusive") for r in results)
        assert all_passed(results)

    def test_unknown_suite(self, small_runner):
        """Тест неизвестного набора."""
        with pytest.raises(ValueError):
            small_runner.run("everything")


class TestSuiteResult:
    """Тесты для SuiteResult и all_passed."""

    def test_to_dict_and_verdict(self):
        """Тест сериализации и итогового вердикта."""
        ok = SuiteResult("f00", "poisson", make_report("demo", 0.0, 1.0, 0.0))
        bad = SuiteResult("f01", "poisson", make_report("demo", 2.0, 1.0, 0.0))
        assert ok.to_dict()["function_id"] == "f00"
        assert ok.key == ("f00", "poisson", "demo")
        assert all_passed([ok])
        assert not all_passed([ok, bad])


@pytest.mark.slow
class TestSequenceSuites:
    """Тесты наборов tail, lemma6, prop5, continuity и convex."""

    @pytest.fixture(scope="class")
    def tent_runner(self, poisson):
        """SuiteRunner с параметрами эксперимента для палатки"""
        return SuiteRunner(corpus=generate_corpus(7, 2), kernels=[poisson], tol=1e-6, grid_n=160)

    def test_tail_suite(self, small_runner):
        """Тест набора tail: оценка хвоста и хвостовая масса."""
        results = small_runner.run("tail")
        assert len(results) == 4
        assert {r.report.name for r in results} == {"tail_bound", "tail_mass"}
        assert all_passed(results)

    def test_lemma6_suite(self, small_runner):
        """Тест набора lemma6 на соседних функциях корпуса."""
        results = small_runner.run("lemma6")
        assert [r.function_id for r in results] == ["f00-tent", "f01-sawtooth"]
        assert all_passed(results)

    def test_continuity_suite(self, tent_runner):
        """Тест набора continuity для палатки."""
        results = tent_runner.run("continuity")
        assert {r.report.name for r in results} == {"continuity", "finite_intervals", "pointwise_derivative"}
        assert all(r.function_id == "tent" for r in results)
        assert all_passed(results)
        assert "poisson" in tent_runner.continuity

    def test_prop5_suite(self, tent_runner):
        """Тест набора prop5, использующего тот же эксперимент."""
        results = tent_runner.run("prop5")
        assert len(results) == 1
        assert not results[0].report.failed
        assert results[0].report.metadata["interval"] == [-1.5, 1.5]

    def test_convex_suite(self, tent_runner):
        """Тест набора convex на компонентах множества отрыва."""
        results = tent_runner.run("convex")
        assert len(results) == 1
        report = results[0].report
        assert report.name == "convex_limit"
        assert not any(d.startswith("precondition") for _, d in report.witnesses)
        assert 1 <= len(report.metadata["deviations"]) <= 7
