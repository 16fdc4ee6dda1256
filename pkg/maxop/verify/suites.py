# suites.py
"""Прогоны проверок свойств по всему корпусу.

:class:`SuiteRunner` владеет одним кэшем профилей; проверки по элементам
корпуса идут в пуле потоков, а результаты упорядочены по
``(function id, kernel, check name)`` независимо от порядка завершения.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import SUITES
from ..corpus import CorpusEntry
from ..errors import SequenceError
from ..funcmodel import (
    PiecewiseLinearFn,
    abs_part,
    add,
    derivative,
    sawtooth,
    scale,
    simple_approx,
    step_l1_distance,
    tent,
)
from ..kernels import KernelSpec
from ..scalespace import MaximalProfile, adaptive_grid, maximal_function, maximal_profile
from .checks import (
    check_abs_convergence,
    check_convex_limit,
    check_finite_intervals,
    check_lemma6,
    check_pointwise_derivative,
    check_prop5,
    check_subharmonicity,
    check_tail_bound,
    check_tail_mass,
    check_transfer_identity,
    check_uniform_bound,
    check_variation_diminishing,
    detached_members,
    pick_tail_radius,
)
from .continuity import ContinuityResult, continuity_experiment
from .reports import NOT_APPLICABLE, PropertyReport, make_report
from .sequences import DEFAULT_INDICES, ContinuitySequence, shifted_tent

logger = logging.getLogger(__name__)

TAIL_EPS = 0.1
UNIFORM_PAIRS = 50
TRANSFER_INSTANCES = 10
LEMMA6_DAMPING = 0.01


@dataclass
class SuiteResult:
    function_id: str
    kernel: str
    report: PropertyReport

    @property
    def key(self) -> Tuple[str, str, str]:
        return self.function_id, self.kernel, self.report.name

    def to_dict(self) -> Dict:
        out = self.report.to_dict()
        out["function_id"] = self.function_id
        out["kernel"] = self.kernel
        return out


@dataclass
class SuiteRunner:
    """Запускает именованные наборы по корпусу и списку ядер."""

    corpus: Sequence[CorpusEntry]
    kernels: Sequence[KernelSpec]
    tol: float = 1e-5
    delta: Optional[float] = None
    grid_n: int = 256
    seed: int = 7
    threads: int = 1
    indices: Sequence[int] = DEFAULT_INDICES
    mode: str = "additive"
    uniform_pairs: int = UNIFORM_PAIRS
    continuity: Dict[str, ContinuityResult] = field(default_factory=dict, init=False, repr=False)
    _profiles: Dict[Tuple[str, str, bytes], MaximalProfile] = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.delta is None:
            self.delta = 10.0 * self.tol

    # ---- profiles ---------------------------------------------------------
    def tail_grid(self, fns: Sequence[PiecewiseLinearFn], k: KernelSpec) -> Tuple[np.ndarray, float]:
        """Адаптивная сетка до ``2R``, где ``R`` из условий на хвосты при ``ε = 0.1``."""
        second = fns[1] if len(fns) > 1 else None
        R = pick_tail_radius(fns[0], second, lambda w: maximal_function(w, k, self.tol), TAIL_EPS)
        lo = min(f.support[0] for f in fns)
        hi = max(f.support[1] for f in fns)
        return adaptive_grid((lo, hi), 2.0 * R, self.grid_n), R

    def profile(self, key: str, u: PiecewiseLinearFn, k: KernelSpec, grid: np.ndarray) -> MaximalProfile:
        cache_key = (key, k.name, np.asarray(grid, dtype=float).tobytes())
        with self._lock:
            hit = self._profiles.get(cache_key)
        if hit is not None:
            return hit
        # внутри задачи профиль считается в один поток, параллельны сами задачи
        p = maximal_profile(u, k, grid, self.tol, threads=1)
        with self._lock:
            self._profiles[cache_key] = p
        return p

    def _entry_profile(self, e: CorpusEntry, k: KernelSpec) -> Tuple[MaximalProfile, float]:
        grid, R = self.tail_grid([e.fn], k)
        return self.profile(e.fid, e.fn, k, grid), R

    # ---- dispatch ---------------------------------------------------------
    def _map(self, tasks: List[Callable[[], List[SuiteResult]]]) -> List[SuiteResult]:
        if self.threads <= 1:
            chunks = [task() for task in tasks]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                chunks = list(pool.map(lambda task: task(), tasks))
        out = [r for chunk in chunks for r in chunk]
        return sorted(out, key=lambda r: r.key)

    def _per_entry(self, fn: Callable[[CorpusEntry, KernelSpec], List[SuiteResult]]) -> List[SuiteResult]:
        tasks = [lambda e=e, k=k: fn(e, k) for e in self.corpus for k in self.kernels]
        return self._map(tasks)

    def run(self, name: str) -> List[SuiteResult]:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
        if name == "all":
            out: List[SuiteResult] = []
            for suite in SUITES[1:]:
                out.extend(self.run(suite))
            return sorted(out, key=lambda r: r.key)
        logger.info(f"suite {name}: {len(self.corpus)} function(s), {len(self.kernels)} kernel(s)")
        results = getattr(self, f"suite_{name}")()
        failed = sum(1 for r in results if r.report.failed)
        logger.info(f"suite {name}: {len(results)} report(s), {failed} failed")
        return results

    # ---- suites -----------------------------------------------------------
    def suite_subharmonicity(self) -> List[SuiteResult]:
        def task(e: CorpusEntry, k: KernelSpec) -> List[SuiteResult]:
            p, _ = self._entry_profile(e, k)
            return [SuiteResult(e.fid, k.name, check_subharmonicity(p, e.fn, self.delta))]

        return self._per_entry(task)

    def suite_variation(self) -> List[SuiteResult]:
        def task(e: CorpusEntry, k: KernelSpec) -> List[SuiteResult]:
            p, _ = self._entry_profile(e, k)
            return [SuiteResult(e.fid, k.name, check_variation_diminishing(e.fn, p))]

        return self._per_entry(task)

    def suite_tail(self) -> List[SuiteResult]:
        def task(e: CorpusEntry, k: KernelSpec) -> List[SuiteResult]:
            p, R = self._entry_profile(e, k)
            out = [SuiteResult(e.fid, k.name, check_tail_bound(e.fn, p, R))]
            u_j = add(e.fn, scale(shifted_tent(e.fn), LEMMA6_DAMPING))
            grid, R2 = self.tail_grid([e.fn, u_j], k)
            p0 = self.profile(e.fid, e.fn, k, grid)
            pj = self.profile(f"{e.fid}+tail", u_j, k, grid)
            out.append(SuiteResult(e.fid, k.name, check_tail_mass(e.fn, u_j, p0, pj, R2, TAIL_EPS)))
            return out

        return self._per_entry(task)

    def uniform_pairs_of(self) -> List[Tuple[str, PiecewiseLinearFn, PiecewiseLinearFn]]:
        """Пары ``(u, u + λg)`` из корпуса по зерну."""
        rng = np.random.default_rng(self.seed)
        n = len(self.corpus)
        out = []
        for i in range(self.uniform_pairs):
            e, g = self.corpus[int(rng.integers(n))], self.corpus[int(rng.integers(n))]
            lam = float(rng.uniform(0.01, 0.5))
            out.append((f"pair{i:02d}:{e.fid}+{g.fid}", e.fn, add(e.fn, scale(g.fn, lam))))
        return out

    def suite_uniform(self) -> List[SuiteResult]:
        def task(pid: str, u: PiecewiseLinearFn, u_j: PiecewiseLinearFn, k: KernelSpec) -> List[SuiteResult]:
            grid, _ = self.tail_grid([u, u_j], k)
            p = maximal_profile(u, k, grid, self.tol, threads=1)
            pj = maximal_profile(u_j, k, grid, self.tol, threads=1)
            return [SuiteResult(pid, k.name, check_uniform_bound(u, u_j, p, pj))]

        tasks = [
            lambda pid=pid, u=u, u_j=u_j, k=k: task(pid, u, u_j, k)
            for pid, u, u_j in self.uniform_pairs_of()
            for k in self.kernels
        ]
        return self._map(tasks)

    def suite_lemma6(self) -> List[SuiteResult]:
        n = len(self.corpus)

        def task(i: int, k: KernelSpec) -> List[SuiteResult]:
            e, g = self.corpus[i], self.corpus[(i + 1) % n]
            u_j = add(e.fn, scale(g.fn, LEMMA6_DAMPING))
            du = derivative(abs_part(e.fn))
            measured = step_l1_distance(du, derivative(abs_part(u_j)))
            eps = max(1.0001 * measured, 1e-12)
            v = simple_approx(du, eps / 2.0)
            grid, _ = self.tail_grid([e.fn, u_j], k)
            pj = self.profile(f"{e.fid}+{g.fid}/100", u_j, k, grid)
            report = check_lemma6(e.fn, u_j, pj, v, eps, self.delta)
            return [SuiteResult(e.fid, k.name, report)]

        return self._map([lambda i=i, k=k: task(i, k) for i in range(n) for k in self.kernels])

    def suite_transfer(self) -> List[SuiteResult]:
        rng = np.random.default_rng(self.seed)
        instances = []
        for i in range(TRANSFER_INSTANCES):
            teeth = 3 + i % 3
            width = float(rng.uniform(0.5, 1.5))
            u = sawtooth(teeth=teeth, width=width, height=float(rng.uniform(0.5, 2.0)), start=-teeth * width / 2.0)
            instances.append((f"saw{i:02d}", u))

        def task(fid: str, u: PiecewiseLinearFn, k: KernelSpec) -> List[SuiteResult]:
            lo, hi = u.support
            pad = 0.25 * (hi - lo)
            grid = np.linspace(lo - pad, hi + pad, 4 * self.grid_n)
            p = self.profile(fid, u, k, grid)
            return [SuiteResult(fid, k.name, check_transfer_identity(u, p, cells=u.breakpoints.size // 4 or 1))]

        return self._map([lambda f=f, u=u, k=k: task(f, u, k) for f, u in instances for k in self.kernels])

    def suite_abs(self) -> List[SuiteResult]:
        def task(e: CorpusEntry) -> List[SuiteResult]:
            out = []
            for mode in ("additive", "jitter"):
                try:
                    seq = ContinuitySequence(e.fn, indices=tuple(self.indices), mode=mode, seed=self.seed)
                    report = check_abs_convergence(seq)
                except SequenceError as exc:
                    report = make_report("abs_convergence", 0.0, 0.0, 0.0, metadata={"reason": str(exc)}, status=NOT_APPLICABLE)
                report.name = f"abs_convergence[{mode}]"
                out.append(SuiteResult(e.fid, "-", report))
            return out

        return self._map([lambda e=e: task(e) for e in self.corpus])

    # ---- sequence suites (tent, one experiment per kernel) -----------------
    def sequence(self) -> ContinuitySequence:
        return ContinuitySequence(tent(), indices=tuple(self.indices), mode=self.mode, seed=self.seed)

    def experiment(self, k: KernelSpec) -> ContinuityResult:
        with self._lock:
            hit = self.continuity.get(k.name)
        if hit is not None:
            return hit
        result = continuity_experiment(self.sequence(), k, tol=self.tol, delta=self.delta, grid_n=self.grid_n, threads=1)
        with self._lock:
            self.continuity[k.name] = result
        return result

    def _on_kernels(self, fn: Callable[[KernelSpec], List[SuiteResult]]) -> List[SuiteResult]:
        return self._map([lambda k=k: fn(k) for k in self.kernels])

    def suite_continuity(self) -> List[SuiteResult]:
        def task(k: KernelSpec) -> List[SuiteResult]:
            seq = self.sequence()
            res = self.experiment(k)
            fid = "tent"
            return [
                SuiteResult(fid, k.name, res.report),
                SuiteResult(fid, k.name, check_finite_intervals(seq.base, seq, res.profiles, res.profile, self.delta)),
                SuiteResult(fid, k.name, check_pointwise_derivative(seq, res.profiles, res.profile, self.delta)),
            ]

        return self._on_kernels(task)

    def suite_convex(self) -> List[SuiteResult]:
        def task(k: KernelSpec) -> List[SuiteResult]:
            seq = self.sequence()
            res = self.experiment(k)
            members, limit = detached_members(seq, res.profiles, res.profile, self.delta)
            if not members:
                meta = {"kernel": k.name, "reason": "no detachment component shared along the sequence"}
                report = make_report("convex_limit", 0.0, 0.0, 0.0, metadata=meta, status=NOT_APPLICABLE)
            else:
                err = max(res.profile.err, *(res.profiles[j].err for j in seq.indices))
                h = float(np.min(np.diff(res.profile.grid)))
                report = check_convex_limit(members, limit, slack=4.0 * err, slope_slack=2.0 * err / h)
            return [SuiteResult("tent", k.name, report)]

        return self._on_kernels(task)

    def suite_prop5(self) -> List[SuiteResult]:
        def task(k: KernelSpec) -> List[SuiteResult]:
            seq = self.sequence()
            res = self.experiment(k)
            lo, hi = seq.base.support
            span = (float(res.profile.grid[0]), float(res.profile.grid[-1]))
            interval = (max(lo - 0.5, span[0]), min(hi + 0.5, span[1]))
            return [SuiteResult("tent", k.name, check_prop5(seq.base, seq, res.profiles, res.profile, interval))]

        return self._on_kernels(task)


def all_passed(results: Sequence[SuiteResult]) -> bool:
    return not any(r.report.failed for r in results)
