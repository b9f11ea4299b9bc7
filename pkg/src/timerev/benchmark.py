"""Monte Carlo rejection frequencies for the simulated processes.

Replication ``k`` of a model draws from stream ``(model code, k)`` for every
sample size, so frequencies across ``n`` are computed on matched seeds and
all methods see the same series.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import EvaluationGrid, RngStream, default_grid
from .ghm import GhmError, MarConvergenceError, SingularDesignError, Verdict, ghm_decide
from .processes import DEFAULT_BURN_IN, Model, SimSpec, simulate
from .reversibility import SubsampleConfig, reject, rule_of_thumb_block, subsample_test

logger = logging.getLogger(__name__)

METHODS = ("ICS", "GHM1", "GHM2")


@dataclass(frozen=True)
class Cell:
    method: str
    model: str
    n: int
    reps: int
    rejections: int
    failures: int
    alpha: float

    @property
    def frequency(self) -> float:
        return self.rejections / self.reps

    def row(self) -> dict:
        return {"method": self.method, "model": self.model, "n": self.n,
                "reps": self.reps, "rejections": self.rejections,
                "failures": self.failures, "frequency": self.frequency,
                "alpha": self.alpha}


def replication(model: str, n: int, rep: int, seed: int, methods: Sequence[str],
                alpha: float = 0.05, grid: Optional[EvaluationGrid] = None,
                burn_in: int = DEFAULT_BURN_IN) -> dict[str, Optional[bool]]:
    """Rejection outcome per method for one simulated series (None = fit failed)."""
    model = Model(model)
    x = simulate(SimSpec(model, n, RngStream(seed, (model.code, rep)), burn_in)).values
    out: dict[str, Optional[bool]] = {}
    if "ICS" in methods:
        cfg = SubsampleConfig(rule_of_thumb_block(n), grid or default_grid())
        out["ICS"] = reject(subsample_test(x, cfg), alpha)
    ghm = [m for m in methods if m.startswith("GHM")]
    if ghm:
        try:
            trace = ghm_decide(x, alpha=alpha)
            for m in ghm:
                out[m] = trace.verdicts[int(m[3:])] is Verdict.IRREVERSIBLE
        except (GhmError, MarConvergenceError, SingularDesignError) as exc:
            logger.warning("GHM failed on %s n=%d rep=%d: %s", model.value, n, rep, exc)
            for m in ghm:
                out[m] = None
    return out


def _task(args):
    return replication(*args)


def rejection_table(models: Iterable[str], ns: Iterable[int], reps: int,
                    methods: Sequence[str] = METHODS, seed: int = 0,
                    alpha: float = 0.05, workers: int = 1,
                    grid: Optional[EvaluationGrid] = None,
                    burn_in: int = DEFAULT_BURN_IN) -> list[Cell]:
    """One `Cell` per (method, model, n); independent of `workers`."""
    methods = [m.upper() for m in methods]
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods {sorted(unknown)}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    models = [Model(m).value for m in models]
    ns = [int(n) for n in ns]
    jobs = [(m, n, k, seed, methods, alpha, grid, burn_in)
            for m in models for n in ns for k in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_task, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        results = [_task(j) for j in jobs]

    cells = []
    for model in models:
        for n in ns:
            block = [r for j, r in zip(jobs, results) if j[0] == model and j[1] == n]
            for method in methods:
                outcomes = [r[method] for r in block]
                cells.append(Cell(method, model, n, reps,
                                  sum(1 for o in outcomes if o),
                                  sum(1 for o in outcomes if o is None), alpha))
    return cells


def outcomes(model: str, n: int, reps: int, method: str = "ICS", seed: int = 0,
             alpha: float = 0.05, grid=None) -> np.ndarray:
    """Per-replication rejection indicators, for matched-seed comparisons."""
    return np.array([bool(replication(model, n, k, seed, [method], alpha, grid)[method])
                     for k in range(reps)])
