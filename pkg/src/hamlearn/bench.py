"""Seeded benchmark trials and resource-scaling sweeps over (s, eps)."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._stats import loglog_slope
from .hamiltonian import SparseHamiltonian, l1_distance, linf_distance, op_distance, random_instance
from .learner import LearnerParams, learn_hamiltonian
from .oracle import EvolutionOracle, OracleConfig


@dataclass(frozen=True)
class TrialRecord:
    """One learning run: instance parameters, errors, full ledger."""

    s: int
    eps: float
    seed: int
    success: bool
    linf_error: float
    l1_error: float
    op_error: float
    experiments: int
    total_time: float
    queries: int
    min_resolution: float
    ancilla: int

    CSV_FIELDS = (
        "s",
        "eps",
        "seed",
        "success",
        "linf_error",
        "l1_error",
        "op_error",
        "experiments",
        "total_time",
        "queries",
        "min_resolution",
        "ancilla",
    )

    def csv_row(self) -> str:
        vals = [getattr(self, f) for f in self.CSV_FIELDS]
        out = []
        for v in vals:
            if isinstance(v, bool):
                out.append("1" if v else "0")
            elif isinstance(v, float):
                out.append(f"{v:.12g}")
            else:
                out.append(str(v))
        return ",".join(out)


def detectability_floor(eps: float) -> float:
    """Instance coefficient floor keeping every term above the target eps."""
    return min(0.9, max(0.1, 2.0 * eps))


def run_learning_trial(
    n: int,
    s: int,
    eps: float,
    delta: float,
    seed: int,
    spam_lambda: float = 0.0,
    mode: str = "exact",
    s_bound: int | None = None,
    support_rounds_c0: float = 64.0,
    shots_c1: float = 1.0,
    hamiltonian: SparseHamiltonian | None = None,
) -> TrialRecord:
    """One seeded end-to-end learning run against a random instance."""
    seq = np.random.SeedSequence(seed)
    inst_rng, oracle_rng, learner_rng = (np.random.default_rng(c) for c in seq.spawn(3))
    if hamiltonian is None:
        hamiltonian = random_instance(n, s, inst_rng, coeff_floor=detectability_floor(eps))
    config = OracleConfig(mode=mode, spam_lambda=spam_lambda)
    oracle = EvolutionOracle(hamiltonian, config, rng=oracle_rng)
    params = LearnerParams(
        s_bound=s_bound if s_bound is not None else s,
        eps=eps,
        delta=delta,
        support_rounds_c0=support_rounds_c0,
        shots_c1=shots_c1,
    )
    result = learn_hamiltonian(oracle, params, learner_rng)

    linf = linf_distance(hamiltonian, result.hamiltonian)
    success = linf <= eps and result.hamiltonian.support <= hamiltonian.support
    led = result.ledger
    return TrialRecord(
        s=s,
        eps=eps,
        seed=seed,
        success=success,
        linf_error=linf,
        l1_error=l1_distance(hamiltonian, result.hamiltonian),
        op_error=op_distance(hamiltonian, result.hamiltonian),
        experiments=led.experiments,
        total_time=led.total_evolution_time,
        queries=led.queries,
        min_resolution=led.min_time_resolution,
        ancilla=led.ancilla_qubits,
    )


def _worker_count() -> int:
    raw = os.environ.get("HAMLEARN_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep(
    s_grid: list[int],
    eps_grid: list[float],
    trials: int,
    base_seed: int,
    n: int = 8,
    delta: float = 0.1,
    spam_lambda: float = 0.0,
    support_rounds_c0: float = 64.0,
    shots_c1: float = 1.0,
) -> list[TrialRecord]:
    """Run the (s, eps) product grid; rows come back in grid order.

    Every cell derives its own seeds, so results are independent of the
    worker count (HAMLEARN_WORKERS).
    """
    if not s_grid or not eps_grid or trials < 1:
        raise ValueError("sweep needs nonempty grids and at least one trial")
    specs = []
    counter = 0
    for s in s_grid:
        for eps in eps_grid:
            for _ in range(trials):
                specs.append((s, eps, base_seed + counter))
                counter += 1

    def run(spec):
        s, eps, seed = spec
        return run_learning_trial(
            n=n,
            s=s,
            eps=eps,
            delta=delta,
            seed=seed,
            spam_lambda=spam_lambda,
            support_rounds_c0=support_rounds_c0,
            shots_c1=shots_c1,
        )

    workers = _worker_count()
    if workers == 1:
        return [run(sp) for sp in specs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, specs))


def experiments_slope(rows: list[TrialRecord]) -> float:
    """Log-log slope of mean experiments against s ln s."""
    by_s: dict[int, list[int]] = {}
    for row in rows:
        by_s.setdefault(row.s, []).append(row.experiments)
    ss = sorted(by_s)
    if len(ss) < 2:
        raise ValueError("need at least two sparsity values")
    xs = [s * math.log(s) for s in ss]
    ys = [float(np.mean(by_s[s])) for s in ss]
    return loglog_slope(xs, ys)


def evolution_time_slope(rows: list[TrialRecord]) -> float:
    """Log-log slope of mean total evolution time against 1/eps."""
    by_eps: dict[float, list[float]] = {}
    for row in rows:
        by_eps.setdefault(row.eps, []).append(row.total_time)
    es = sorted(by_eps)
    if len(es) < 2:
        raise ValueError("need at least two accuracy values")
    xs = [1.0 / e for e in es]
    ys = [float(np.mean(by_eps[e])) for e in es]
    return loglog_slope(xs, ys)
