"""Max-type reversibility statistic with subsampling p-values.

The full-sample statistic is ``sqrt(n) * max |Im F_n|`` over the grid. Each
overlapping block ``x[t:t+b]`` (ranks recomputed inside the block) gives
``(1 - b/n)**-0.5 * sqrt(b) * max |Im F_b,t|``, and the p-value is the
fraction of block statistics strictly above the full-sample one.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import EvaluationGrid, Series, as_array, default_grid
from .spectrum import IcsSurface, block_imag_max, integrated_spectrum

RULE_EXPONENTS = range(4, 9)


class SampleTooShortError(ValueError):
    """The block-length rule has no admissible candidate for this ``n``."""


@dataclass(frozen=True)
class SubsampleConfig:
    b: int
    grid: EvaluationGrid = field(default_factory=default_grid)
    strict: bool = True
    stride: int = 1

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 2:
            raise ValueError("block length must be an integer >= 2")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")


@dataclass
class TestReport:
    statistic: float
    p_value: float
    block_stats: np.ndarray
    argmax: tuple[float, float, float]
    argmax_index: tuple[int, int, int]
    b: int
    n: int

    __test__ = False  # keep pytest from collecting this class

    @property
    def n_exceed(self) -> int:
        return int(round(self.p_value * self.block_stats.size))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "b": self.b,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "argmax": {"lambda": self.argmax[0], "tau1": self.argmax[1],
                       "tau2": self.argmax[2]},
            "n_blocks": int(self.block_stats.size),
        }


def rule_of_thumb_block(n: int) -> int:
    """Largest ``2**j <= 2 * n**(2/3)`` with ``j`` in 4..8."""
    if n < 1:
        raise ValueError("sample length must be positive")
    bound = 2.0 * n ** (2.0 / 3.0)
    candidates = [2 ** j for j in RULE_EXPONENTS if 2 ** j <= bound]
    if not candidates:
        raise SampleTooShortError(
            f"sample too short for rule of thumb (n={n}); pass a block length")
    return max(candidates)


def test_statistic(surface: IcsSurface, m: Optional[int] = None) -> float:
    """``sqrt(m) * max |Im F|`` over the surface's grid."""
    m = surface.m if m is None else m
    return math.sqrt(m) * float(np.abs(surface.imag).max())


test_statistic.__test__ = False


def _argmax(surface: IcsSurface) -> tuple[int, int, int]:
    flat = int(np.argmax(np.abs(surface.imag)))
    return tuple(int(i) for i in np.unravel_index(flat, surface.values.shape))


def block_statistics(x, config: SubsampleConfig, workers: int = 1) -> np.ndarray:
    """All scaled block statistics, ordered by block start."""
    x = as_array(x)
    n, b = x.size, config.b
    starts = np.arange(0, n - b + 1, config.stride)
    scale = math.sqrt(b) / math.sqrt(1.0 - b / n)
    out = np.empty(starts.size)

    def run(part):
        for chunk, mx in block_imag_max(x, b, config.grid, part):
            out[np.searchsorted(starts, chunk)] = scale * mx

    if workers <= 1 or starts.size < 2 * workers:
        run(starts)
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, np.array_split(starts, workers)))
    return out


def subsample_test(series, config: Optional[SubsampleConfig] = None,
                   workers: int = 1) -> TestReport:
    """Run the reversibility test on `series`.

    With no `config` the block length follows `rule_of_thumb_block` and the
    default grid is used.
    """
    x = as_array(series)
    n = x.size
    if config is None:
        config = SubsampleConfig(rule_of_thumb_block(n))
    b = config.b
    if b >= n:
        raise ValueError(f"block length {b} must be smaller than n={n}")
    surface = integrated_spectrum(x, config.grid)
    stat = test_statistic(surface)
    blocks = block_statistics(x, config, workers)
    exceed = blocks > stat if config.strict else blocks >= stat
    idx = _argmax(surface)
    return TestReport(
        statistic=stat,
        p_value=int(np.count_nonzero(exceed)) / blocks.size,
        block_stats=blocks,
        argmax=config.grid.point(idx),
        argmax_index=idx,
        b=b,
        n=n,
    )


def reject(report: TestReport, alpha: float = 0.05) -> bool:
    """Reject when ``p_value < alpha``.

    A zero statistic (e.g. an all-tied sample) never rejects: it is the
    smallest attainable value and the strict count then gives ``p = 0``.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return report.statistic > 0 and report.p_value < alpha


def ics_test(series, alpha: float = 0.05, b: Optional[int] = None,
             grid: Optional[EvaluationGrid] = None, workers: int = 1):
    """Convenience wrapper returning ``(report, rejected)``."""
    x = as_array(series)
    grid = default_grid() if grid is None else grid
    b = rule_of_thumb_block(x.size) if b is None else b
    report = subsample_test(x, SubsampleConfig(b, grid), workers)
    return report, reject(report, alpha)
