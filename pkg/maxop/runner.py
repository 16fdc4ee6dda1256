# runner.py
"""Выполнение подкоманд: ``kernel``, ``maximal``, ``verify``, ``continuity``, ``bruteforce``.

:func:`run` принимает проверенный :class:`RunConfig`, пишет артефакты в
``out_dir`` и возвращает :class:`RunOutcome` с кодом выхода
(0, если все выбранные проверки прошли, иначе 1).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .bruteforce import dense_ladder_profile, fractional_constant_oracle
from .config import RunConfig
from .corpus import generate_corpus
from .emit import convergence_plot, kernel_plot, profile_plot, write_csv, write_json
from .funcmodel import PiecewiseLinearFn, abs_part, from_dict, norm_w11, tent
from .kernels import KernelFamily, KernelSpec, analytic_fractional_constant, make_kernel, tabulate
from .scalespace import adaptive_grid, maximal_function, maximal_profile
from .verify import ContinuitySequence, SuiteResult, SuiteRunner, all_passed, continuity_experiment, pick_tail_radius

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-5
TAIL_EPS = 0.1


@dataclass
class RunOutcome:
    exit_code: int
    files: List[Path] = field(default_factory=list)
    failures: List[Path] = field(default_factory=list)
    results: List[SuiteResult] = field(default_factory=list)
    paths: Dict[Tuple[str, str, str], str] = field(default_factory=dict)


def kernel_for(cfg: RunConfig) -> KernelSpec:
    return make_kernel(cfg.kernel, cfg.alpha if cfg.kernel == KernelFamily.FRACTIONAL_POISSON.value else None)


def all_kernels(cfg: RunConfig) -> List[KernelSpec]:
    return [make_kernel("poisson"), make_kernel("heat"), make_kernel("fracpoisson", cfg.alpha)]


def function_for(cfg: RunConfig) -> PiecewiseLinearFn:
    return from_dict(cfg.function) if cfg.function else tent()


def grid_for(u: PiecewiseLinearFn, k: KernelSpec, cfg: RunConfig) -> np.ndarray:
    """Равномерная сетка на ``[−span, span]`` при заданном ``grid_span``, иначе адаптивная до ``2R``."""
    if cfg.grid_span is not None:
        return np.linspace(-cfg.grid_span, cfg.grid_span, cfg.grid_n)
    eps = TAIL_EPS * (norm_w11(u) or 1.0)
    R = pick_tail_radius(u, None, lambda w: maximal_function(w, k, cfg.tol), eps)
    return adaptive_grid(u.support, 2.0 * R, cfg.grid_n)


def safe_name(*parts: str) -> str:
    return "__".join(re.sub(r"[^A-Za-z0-9_.+-]", "_", p) for p in parts)


# ---- subcommands -------------------------------------------------------------
def run_kernel(cfg: RunConfig, out: Path) -> RunOutcome:
    k = kernel_for(cfg)
    xs = np.linspace(-cfg.tabulate_span, cfg.tabulate_span, cfg.grid_n)
    rows = tabulate(k, xs)
    files = [
        write_csv(out / "kernel.csv", ["x", "phi"], rows),
        kernel_plot(out / "kernel.svg", xs, np.array([r[1] for r in rows]), title=k.name),
    ]
    return RunOutcome(0, files)


def run_maximal(cfg: RunConfig, out: Path) -> RunOutcome:
    u = function_for(cfg)
    k = kernel_for(cfg)
    grid = grid_for(u, k, cfg)
    p = maximal_profile(u, k, grid, cfg.tol, threads=cfg.threads)
    uv = np.asarray(u(grid))
    files = [
        write_csv(out / "maximal.csv", ["x", "u", "ustar", "tstar"], zip(grid, uv, p.ustar, p.tstar)),
        profile_plot(out / "maximal.svg", grid, np.abs(uv), p.ustar, title=f"u* ({k.name})"),
    ]
    return RunOutcome(0, files)


def _write_results(results: List[SuiteResult], out: Path) -> Tuple[List[Path], List[Path], Dict]:
    files, failures, paths = [], [], {}
    for r in results:
        path = write_json(out / "reports" / f"{safe_name(r.function_id, r.kernel, r.report.name)}.json", r.to_dict())
        files.append(path)
        paths[r.key] = str(path)
        if r.report.failed:
            failures.append(path)
    rows = [
        (r.function_id, r.kernel, r.report.name, r.report.status, r.report.passed, r.report.lhs, r.report.rhs, r.report.slack)
        for r in results
    ]
    header = ["function_id", "kernel", "check", "status", "passed", "lhs", "rhs", "slack"]
    files.append(write_csv(out / "summary.csv", header, rows))
    return files, failures, paths


def run_verify(cfg: RunConfig, out: Path) -> RunOutcome:
    runner = SuiteRunner(
        corpus=generate_corpus(cfg.seed, cfg.corpus_size),
        kernels=all_kernels(cfg),
        tol=cfg.tol,
        delta=cfg.effective_delta,
        grid_n=cfg.grid_n,
        seed=cfg.seed,
        threads=cfg.threads,
        indices=tuple(cfg.indices),
        mode=cfg.mode,
    )
    results = runner.run(cfg.suite)
    files, failures, paths = _write_results(results, out)
    if runner.continuity:
        indices = list(cfg.indices)
        series = {name: [row.energy for row in res.rows] for name, res in runner.continuity.items()}
        files.append(convergence_plot(out / "continuity.svg", series, indices, title="E_j", ylabel="E_j"))
    return RunOutcome(0 if all_passed(results) else 1, files, failures, results, paths)


def run_continuity(cfg: RunConfig, out: Path) -> RunOutcome:
    u = function_for(cfg)
    k = kernel_for(cfg)
    seq = ContinuitySequence(u, indices=tuple(cfg.indices), mode=cfg.mode, seed=cfg.seed)
    grid = np.linspace(-cfg.grid_span, cfg.grid_span, cfg.grid_n) if cfg.grid_span is not None else None
    res = continuity_experiment(
        seq, k, grid=grid, tol=cfg.tol, delta=cfg.effective_delta, grid_n=cfg.grid_n, threads=cfg.threads
    )
    header = list(res.rows[0].to_dict()) if res.rows else ["j"]
    indices = [row.j for row in res.rows]
    files = [
        write_csv(out / "continuity.csv", header, [list(row.to_dict().values()) for row in res.rows]),
        write_json(out / "continuity.json", res.report.to_dict()),
        convergence_plot(
            out / "continuity.svg",
            {
                "E_j": [row.energy for row in res.rows],
                "||u_j - u||_{1,1}": [row.w11_distance for row in res.rows],
                "sup|u_j* - u*|": [row.sup_gap for row in res.rows],
            },
            indices,
            title=f"continuity ({k.name}, {seq.mode})",
        ),
    ]
    failed = res.report.failed
    result = SuiteResult("function", k.name, res.report)
    return RunOutcome(1 if failed else 0, files, [files[1]] if failed else [], [result])


def oracle_gaps(u: PiecewiseLinearFn, k: KernelSpec, n: int, cfg: RunConfig) -> Tuple[np.ndarray, List[Tuple], np.ndarray, np.ndarray]:
    """Сетка на расширенном носителе, значения ``u*``, пары оракула ``(value, t)`` и расхождения."""
    lo, hi = u.support
    pad = 0.5 * (hi - lo)
    grid = np.linspace(lo - pad, hi + pad, n)
    p = maximal_profile(u, k, grid, cfg.tol, threads=cfg.threads)
    oracle = dense_ladder_profile(u, k, grid, cfg.oracle_scales)
    gaps = np.abs(np.array([o[0] for o in oracle]) - p.ustar)
    return grid, oracle, p.ustar, gaps


def run_bruteforce(cfg: RunConfig, out: Path) -> RunOutcome:
    if cfg.oracle_corpus:
        return run_bruteforce_corpus(cfg, out)
    u = function_for(cfg)
    k = kernel_for(cfg)
    grid, oracle, ustar, gaps = oracle_gaps(u, k, cfg.grid_n, cfg)
    rows = [(x, float(abs_part(u)(x)), o[0], o[1], m, g) for x, o, m, g in zip(grid, oracle, ustar, gaps)]
    max_gap = float(np.max(gaps))
    summary = {"kernel": k.name, "points": int(grid.size), "scales": cfg.oracle_scales, "max_gap": max_gap}
    if k.family is KernelFamily.FRACTIONAL_POISSON:
        summary["norm_const"] = {
            "normalized": k.norm_const,
            "analytic": analytic_fractional_constant(float(k.alpha)),
            "oracle": fractional_constant_oracle(float(k.alpha)),
        }
    ok = max_gap <= ORACLE_TOLERANCE + cfg.tol
    summary["passed"] = ok
    logger.info(f"bruteforce[{k.name}]: max |oracle - maximal| = {max_gap:.3e}")
    files = [
        write_csv(out / "bruteforce.csv", ["x", "abs_u", "oracle", "oracle_t", "maximal", "gap"], rows),
        write_json(out / "bruteforce.json", summary),
    ]
    return RunOutcome(0 if ok else 1, files, [] if ok else [files[1]])


def run_bruteforce_corpus(cfg: RunConfig, out: Path) -> RunOutcome:
    """Расхождения с оракулом для каждой функции корпуса на трёх ядрах.

    Parameters
    ----------
    cfg : RunConfig
        ``corpus_size`` функций, по ``oracle_points`` точек на каждую
    out : Path
        Каталог для ``bruteforce.csv`` и ``bruteforce.json``
    """
    rows = []
    pairs = []
    for e in generate_corpus(cfg.seed, cfg.corpus_size):
        for k in all_kernels(cfg):
            grid, oracle, ustar, gaps = oracle_gaps(e.fn, k, cfg.oracle_points, cfg)
            a = abs_part(e.fn)
            rows.extend((e.fid, k.name, x, float(a(x)), o[0], o[1], m, g) for x, o, m, g in zip(grid, oracle, ustar, gaps))
            pairs.append({"function_id": e.fid, "kernel": k.name, "max_gap": float(np.max(gaps))})
            logger.debug(f"bruteforce[{e.fid}, {k.name}]: max gap {pairs[-1]['max_gap']:.3e}")
    max_gap = max(p["max_gap"] for p in pairs)
    ok = max_gap <= ORACLE_TOLERANCE + cfg.tol
    failing = [p for p in pairs if p["max_gap"] > ORACLE_TOLERANCE + cfg.tol]
    summary = {
        "mode": "corpus",
        "functions": cfg.corpus_size,
        "points": cfg.oracle_points,
        "scales": cfg.oracle_scales,
        "max_gap": max_gap,
        "pairs": pairs,
        "failing": failing,
        "passed": ok,
    }
    logger.info(f"bruteforce corpus: {len(pairs)} pair(s), max |oracle - maximal| = {max_gap:.3e}")
    header = ["function_id", "kernel", "x", "abs_u", "oracle", "oracle_t", "maximal", "gap"]
    files = [write_csv(out / "bruteforce.csv", header, rows), write_json(out / "bruteforce.json", summary)]
    return RunOutcome(0 if ok else 1, files, [] if ok else [files[1]])


COMMANDS = {
    "kernel": run_kernel,
    "maximal": run_maximal,
    "verify": run_verify,
    "continuity": run_continuity,
    "bruteforce": run_bruteforce,
}


def run(cfg: RunConfig, db_url: Optional[str] = None) -> RunOutcome:
    """Выполнить ``cfg.command`` и записать запуск в журнал, если задана база данных."""
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outcome = COMMANDS[cfg.command](cfg, out)

    db_url = db_url or cfg.db_url
    if db_url:
        from .models import Run, open_ledger, record_reports

        session = open_ledger(db_url)
        try:
            ledger = Run(
                command=cfg.command,
                kernel=cfg.kernel,
                suite=cfg.suite if cfg.command == "verify" else None,
                seed=cfg.seed,
                tol=cfg.tol,
                config=cfg.to_dict(),
                out_dir=str(out),
                exit_code=outcome.exit_code,
            )
            session.add(ledger)
            n = record_reports(session, ledger, outcome.results, outcome.paths)
            ledger.finished_at = datetime.utcnow()
            session.commit()
            logger.info(f"ledger: run {ledger.id} with {n} report(s) -> {db_url}")
        finally:
            session.close()
    return outcome
