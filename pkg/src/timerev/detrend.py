"""Hodrick-Prescott trend/cycle decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .core import Series, as_array

MONTHLY_LAMBDA = 14400.0
YEARLY_LAMBDA = 100.0


@dataclass(frozen=True)
class HpConfig:
    smoothing: float

    def __post_init__(self):
        if not math.isfinite(self.smoothing) or self.smoothing < 0:
            raise ValueError("HP smoothing must be finite and non-negative")


def hp_banded(n: int, smoothing: float) -> np.ndarray:
    """Upper banded form of ``I + smoothing * D'D`` (D = second differences)."""
    # D'D is pentadiagonal with bands (1, -4, 6, -4, 1) away from the edges
    main = np.full(n, 6.0)
    main[[0, -1]] = 1.0
    main[[1, -2]] = 5.0
    first = np.full(n - 1, -4.0)
    first[[0, -1]] = -2.0
    second = np.ones(n - 2)
    ab = np.zeros((3, n))
    ab[0, 2:] = smoothing * second
    ab[1, 1:] = smoothing * first
    ab[2] = 1.0 + smoothing * main
    return ab


def hp_filter(series, config: HpConfig | float):
    """Return ``(trend, cycle)``; ``trend`` minimizes fit error plus
    ``smoothing * sum (second difference of trend)**2``.

    Inputs that are `Series` come back as `Series`, anything else as arrays.
    """
    if not isinstance(config, HpConfig):
        config = HpConfig(float(config))
    y = as_array(series)
    n = y.size
    if n < 4:
        raise ValueError("HP filter needs at least 4 observations")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    if config.smoothing == 0:
        trend = y.copy()
    else:
        # affine sequences pass through unchanged, so only the remainder is
        # filtered; keeps large-smoothing solves well conditioned
        line = _affine_fit(y)
        rest = y - line
        trend = line + solveh_banded(hp_banded(n, config.smoothing), rest)
    cycle = y - trend
    if isinstance(series, Series):
        return (Series(trend, series.label, series.interval),
                Series(cycle, series.label, series.interval))
    return trend, cycle


def _affine_fit(y: np.ndarray) -> np.ndarray:
    t = np.arange(y.size, dtype=float) - (y.size - 1) / 2.0
    slope = float(t @ (y - y.mean())) / float(t @ t)
    return y.mean() + slope * t
