"""Monte Carlo model-selection experiment driver.

One replication simulates a path from the generative model, reduces it once
to the truncation statistics, fits every candidate from its configured
starting point, and records the winner under each criterion.  Replications
are independent and seeded by (master_seed, n, rep_index), so results do not
depend on the degree of parallelism.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .criteria import CriterionValue, select
from .errors import NumericalError
from .estimation import FitConfig, FitResult, GivenPoint, fit
from .likelihood import TruncationRule, truncation_stats
from .sem import StructuralSpec
from .simulate import SimConfig, TrueModelSpec, simulate_observations

CRITERIA = ("qbic", "qaic")
FAILED = "failed"


@dataclass
class CandidateModel:
    """A named candidate with its configured starting point."""

    name: str
    spec: StructuralSpec
    init: np.ndarray


@dataclass
class ExperimentConfig:
    true_model: TrueModelSpec
    candidates: list[CandidateModel]
    replications: int
    n_grid: list[int]
    t_end: float = 1.0
    rule: TruncationRule = field(default_factory=lambda: TruncationRule(d=10.0, rho=0.4))
    fit: FitConfig = field(default_factory=lambda: FitConfig(init=GivenPoint(np.empty(0))))
    master_seed: int = 0
    threads: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.n_grid or list(self.n_grid) != sorted(self.n_grid):
            raise ValueError("n_grid must be a nonempty ascending list")
        names = [c.name for c in self.candidates]
        if len(set(names)) != len(names) or FAILED in names:
            raise ValueError(f"candidate names must be unique and none may be {FAILED!r}")


@dataclass
class ReplicationResult:
    n: int
    rep_index: int
    seed: int
    winners: dict[str, str]
    values: list[CriterionValue]
    fits: dict[str, FitResult]
    error: str | None = None


@dataclass
class SelectionReport:
    """Selection over one data set: per-candidate criteria plus winners."""

    values: list[CriterionValue]
    winners: dict[str, str]
    fits: dict[str, FitResult]


@dataclass
class SelectionTable:
    """Tallies of winners per criterion, sample size and model.

    ``counts[criterion][n][model]`` sums with the ``failed`` column to the
    replication count for every (criterion, n) pair.
    """

    counts: dict[str, dict[int, dict[str, int]]]
    replications: int
    model_names: list[str]
    master_seed: int
    runtime_s: float

    def fraction(self, criterion: str, n: int, model: str) -> float:
        return self.counts[criterion][n][model] / self.replications

    def to_text(self) -> str:
        lines = []
        width = max(len(m) for m in self.model_names + [FAILED]) + 2
        for criterion in CRITERIA:
            lines.append(f"selected by {criterion.upper()} (R={self.replications})")
            ns = sorted(self.counts[criterion])
            lines.append(" " * width + "".join(f"{f'n={n}':>14}" for n in ns))
            for model in self.model_names + [FAILED]:
                row = "".join(f"{self.counts[criterion][n][model]:>14}" for n in ns)
                lines.append(f"{model:<{width}}" + row)
            lines.append("")
        return "\n".join(lines)


def replication_seed(master_seed: int, n: int, rep_index: int) -> int:
    """Deterministic per-replication seed derived from (master, n, index)."""
    ss = np.random.SeedSequence([int(master_seed), int(n), int(rep_index)])
    return int(ss.generate_state(1, np.uint64)[0])


def select_over_candidates(
    candidates: list[CandidateModel],
    stats,
    n: int,
    h: float,
    fit_template: FitConfig,
) -> SelectionReport:
    """Fit every candidate on shared statistics and pick both winners."""
    values = []
    fits = {}
    for cand in candidates:
        result = fit(cand.spec, stats, n, h, replace(fit_template, init=GivenPoint(cand.init)))
        fits[cand.name] = result
        values.append(
            CriterionValue.from_fit(cand.name, result.h_value, cand.spec.q, n, result.converged)
        )
    winners = {criterion: select(values, criterion) for criterion in CRITERIA}
    return SelectionReport(values, winners, fits)


def run_replication(cfg: ExperimentConfig, n: int, rep_index: int) -> ReplicationResult:
    """Simulate, reduce, fit all candidates and select; never raises on
    fit failures - they are recorded on the result instead."""
    seed = replication_seed(cfg.master_seed, n, rep_index)
    path = simulate_observations(cfg.true_model, SimConfig(n=n, t_end=cfg.t_end, seed=seed))
    stats = truncation_stats(path, cfg.rule)
    try:
        report = select_over_candidates(cfg.candidates, stats, n, path.h, cfg.fit)
    except NumericalError as exc:
        return ReplicationResult(n, rep_index, seed, {}, [], {}, error=str(exc))
    return ReplicationResult(n, rep_index, seed, report.winners, report.values, report.fits)


_WORKER_CFG: ExperimentConfig | None = None


def _init_worker(cfg: ExperimentConfig) -> None:
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _run_indexed(task: tuple[int, int]) -> ReplicationResult:
    n, rep_index = task
    return run_replication(_WORKER_CFG, n, rep_index)


def run_experiment(cfg: ExperimentConfig) -> SelectionTable:
    """All replications over the n grid; parallel across replications.

    The tally counts each replication exactly once per criterion, either for
    the winning model or in the ``failed`` column.
    """
    start = time.perf_counter()
    names = [c.name for c in cfg.candidates]
    counts = {
        criterion: {n: {m: 0 for m in names + [FAILED]} for n in cfg.n_grid}
        for criterion in CRITERIA
    }

    tasks = [(n, r) for n in cfg.n_grid for r in range(cfg.replications)]
    workers = cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)
    if workers == 1:
        results = [run_replication(cfg, n, r) for n, r in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(cfg,)
        ) as pool:
            results = list(pool.map(_run_indexed, tasks, chunksize=8))

    for res in results:
        for criterion in CRITERIA:
            bucket = counts[criterion][res.n]
            if res.error is not None:
                bucket[FAILED] += 1
            else:
                bucket[res.winners[criterion]] += 1

    return SelectionTable(
        counts=counts,
        replications=cfg.replications,
        model_names=names,
        master_seed=cfg.master_seed,
        runtime_s=time.perf_counter() - start,
    )
