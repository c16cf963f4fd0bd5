"""Coverage-sweep experiment harness: seeded repetitions, paired methods.

For every (coverage, repetition) cell one observation mask is sampled and
every method is evaluated on it, so method comparisons are paired.  The
random baseline's link budget is the true number of missing links per layer,
and solvers binarize with the same budget (``top_k``) so no method gets
extra information.  Seeds derive from the base seed by a splittable counter
scheme; there is no global random state.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import MultiplexNetwork
from .errors import CoverageError
from .generate import SyntheticSpec, generate_multiplex
from .metrics import MetricReport, confusion, metric_report
from .observe import ObservationMask, apply_mask, sample_mask
from .solver import SolverConfig, random_baseline, run

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "SummaryRow",
    "derive_seed",
    "missing_link_budget",
    "run_experiment",
    "summarize",
]

DEFAULT_COVERAGES = tuple(round(0.1 * k, 1) for k in range(1, 10))

# roles inside one (coverage, rep) cell
_ROLE_MASK = 0
_ROLE_SOLVER = 1
_ROLE_BASELINE = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a dataset, a coverage grid, repetitions and methods.

    The solver template's method and seed are overridden per run; its other
    fields (tolerance, thresholds) apply to every run.  The default template
    binarizes with ``top_k`` so solver predictions spend the same link budget
    the random baseline gets.
    """

    dataset: MultiplexNetwork | SyntheticSpec
    coverage_grid: tuple[float, ...] = DEFAULT_COVERAGES
    repetitions: int = 50
    methods: tuple[str, ...] = ("ema", "em", "rm")
    solver: SolverConfig = field(
        default_factory=lambda: SolverConfig(binarization="top_k")
    )
    base_seed: int = 0
    sharing_mode: str = "per_layer"
    parallelism: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        for c in self.coverage_grid:
            if not 0.0 < c < 1.0 and c != 1.0:
                raise ValueError(f"coverage {c} outside (0, 1]")
        for method in self.methods:
            if method not in ("ema", "em", "rm"):
                raise ValueError(f"unknown method {method!r}")

    def resolve_dataset(self) -> MultiplexNetwork:
        if isinstance(self.dataset, SyntheticSpec):
            return generate_multiplex(self.dataset)
        return self.dataset


@dataclass(frozen=True)
class RunRecord:
    """One method evaluated on one (coverage, repetition) mask."""

    method: str
    coverage: float
    rep: int
    seed: int
    layers: int
    metrics: MetricReport
    iterations: int
    converged: bool
    wall_time: float
    mask_digest: str


@dataclass(frozen=True)
class SummaryRow:
    method: str
    coverage: float
    runs: int
    mcc_mean: float
    mcc_std: float
    gmean_mean: float
    gmean_std: float


def derive_seed(base_seed: int, coverage_index: int, rep: int, role: int) -> int:
    """Deterministic per-cell seed, independent across (cell, role) pairs."""
    seq = np.random.SeedSequence(base_seed, spawn_key=(coverage_index, rep, role))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def missing_link_budget(net: MultiplexNetwork, mask: ObservationMask) -> list[int]:
    """True number of unobserved links per layer: the budget the random
    baseline (and top_k binarization) is granted."""
    budget = []
    for k, layer in enumerate(net.layers):
        hidden = np.triu(layer.adjacency == 1, k=1) & ~mask.entry_mask(k)
        budget.append(int(hidden.sum()))
    return budget


def _run_cell(
    net: MultiplexNetwork,
    methods: tuple[str, ...],
    solver_template: SolverConfig,
    sharing_mode: str,
    base_seed: int,
    coverage_index: int,
    coverage: float,
    rep: int,
) -> list[RunRecord]:
    """Evaluate every method on one freshly sampled mask."""
    mask_seed = derive_seed(base_seed, coverage_index, rep, _ROLE_MASK)
    solver_seed = derive_seed(base_seed, coverage_index, rep, _ROLE_SOLVER)
    baseline_seed = derive_seed(base_seed, coverage_index, rep, _ROLE_BASELINE)
    mask = sample_mask(
        net.node_count, net.layer_count, coverage, sharing_mode, mask_seed
    )
    obs = apply_mask(net, mask)
    budget = missing_link_budget(net, mask)
    digest = mask.digest()
    records = []
    for method in methods:
        started = time.perf_counter()
        if method == "rm":
            result = random_baseline(obs, budget, baseline_seed)
        else:
            cfg = replace(solver_template, method=method, seed=solver_seed)
            result = run(obs, cfg, link_budget=budget)
        elapsed = time.perf_counter() - started
        counts = confusion(result.predicted, net, mask, scope="pooled")
        records.append(
            RunRecord(
                method=method,
                coverage=coverage,
                rep=rep,
                seed=mask_seed,
                layers=net.layer_count,
                metrics=metric_report(counts),
                iterations=result.iterations_used,
                converged=result.converged,
                wall_time=elapsed,
                mask_digest=digest,
            )
        )
    return records


def run_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    """Run the full coverage sweep; returns records sorted by
    (method, coverage, rep).  Identical configs give identical records."""
    net = cfg.resolve_dataset()
    cells = []
    for ci, coverage in enumerate(cfg.coverage_grid):
        if math.floor(coverage * net.node_count + 0.5) < 1:
            warnings.warn(
                f"coverage {coverage} rounds to zero observed nodes; skipped",
                stacklevel=2,
            )
            continue
        for rep in range(cfg.repetitions):
            cells.append((ci, coverage, rep))
    records: list[RunRecord] = []
    if cfg.parallelism > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            futures = [
                pool.submit(
                    _run_cell, net, cfg.methods, cfg.solver, cfg.sharing_mode,
                    cfg.base_seed, ci, coverage, rep,
                )
                for ci, coverage, rep in cells
            ]
            for future in futures:
                records.extend(future.result())
    else:
        for ci, coverage, rep in cells:
            try:
                records.extend(
                    _run_cell(
                        net, cfg.methods, cfg.solver, cfg.sharing_mode,
                        cfg.base_seed, ci, coverage, rep,
                    )
                )
            except CoverageError as exc:
                warnings.warn(f"coverage {coverage}: {exc}; skipped", stacklevel=2)
    records.sort(key=lambda r: (r.method, r.coverage, r.rep))
    return records


def summarize(records) -> list[SummaryRow]:
    """Group records by (method, coverage): mean and population std of MCC
    and G-mean, in deterministic order."""
    records = list(records)
    if not records:
        raise ValueError("cannot summarize an empty record list")
    groups: dict[tuple[str, float], list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.coverage), []).append(rec)
    rows = []
    for method, coverage in sorted(groups):
        members = groups[(method, coverage)]
        mccs = np.array([r.metrics.mcc for r in members])
        gmeans = np.array([r.metrics.gmean for r in members])
        rows.append(
            SummaryRow(
                method=method,
                coverage=coverage,
                runs=len(members),
                mcc_mean=float(mccs.mean()),
                mcc_std=float(mccs.std()),
                gmean_mean=float(gmeans.mean()),
                gmean_std=float(gmeans.std()),
            )
        )
    return rows
