"""Shared domain types: series container, evaluation grids and seeded streams."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

Interval = Literal["yearly", "monthly", "none"]


@dataclass(frozen=True)
class Series:
    """A finite real-valued sample in observation order."""

    values: np.ndarray
    label: Optional[str] = None
    interval: Interval = "none"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("series values must be one-dimensional")
        if values.size < 2:
            raise ValueError("series must contain at least 2 observations")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains NaN or infinite values")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.interval not in ("yearly", "monthly", "none"):
            raise ValueError(f"unknown sampling interval {self.interval!r}")

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def reversed(self) -> "Series":
        return Series(self.values[::-1], self.label, self.interval)


def as_array(x) -> np.ndarray:
    """Return the values of a `Series` or array-like as a float vector."""
    if isinstance(x, Series):
        return x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional sample")
    return arr


@dataclass(frozen=True)
class EvaluationGrid:
    """Frequency and quantile-level lattice ``lambdas x taus x taus``.

    Downstream code indexes surfaces by ``(lambda_idx, tau1_idx, tau2_idx)``.
    """

    lambdas: np.ndarray
    taus: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).copy()
        tau = np.asarray(self.taus, dtype=float).copy()
        if lam.ndim != 1 or tau.ndim != 1 or lam.size == 0 or tau.size == 0:
            raise ValueError("grid axes must be non-empty vectors")
        if np.any(lam < 0) or np.any(lam > np.pi):
            raise ValueError("frequencies must lie in [0, pi]")
        if np.any(tau <= 0) or np.any(tau >= 1):
            raise ValueError("quantile levels must lie in (0, 1)")
        if np.any(np.diff(lam) <= 0) or np.any(np.diff(tau) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        lam.setflags(write=False)
        tau.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "taus", tau)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.lambdas.size, self.taus.size, self.taus.size)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def point(self, idx) -> tuple[float, float, float]:
        i, j, k = idx
        return (float(self.lambdas[i]), float(self.taus[j]), float(self.taus[k]))

    def __eq__(self, other):
        if not isinstance(other, EvaluationGrid):
            return NotImplemented
        return (np.array_equal(self.lambdas, other.lambdas)
                and np.array_equal(self.taus, other.taus))

    def __hash__(self):
        return hash((self.lambdas.tobytes(), self.taus.tobytes()))


def make_grid(n_lambda: int, n_tau: int) -> EvaluationGrid:
    """Equally spaced frequencies on ``[0, pi]`` and levels ``j/(n_tau+1)``."""
    if int(n_lambda) != n_lambda or int(n_tau) != n_tau:
        raise ValueError("grid counts must be integers")
    if n_lambda < 2:
        raise ValueError("n_lambda must be at least 2")
    if n_tau < 1:
        raise ValueError("n_tau must be at least 1")
    denom = n_lambda - 1
    lambdas = np.array([2 * np.pi * ell / (2 * denom) for ell in range(n_lambda)])
    lambdas[-1] = np.pi
    taus = np.arange(1, n_tau + 1) / (n_tau + 1)
    return EvaluationGrid(lambdas, taus)


def default_grid() -> EvaluationGrid:
    """17 frequencies ``2*pi*l/32`` (l = 0..16) and 31 levels ``j/32``."""
    return make_grid(17, 31)


def parse_grid(text: str) -> EvaluationGrid:
    """Parse a ``"LxT"`` spec such as ``"17x31"``."""
    try:
        n_lambda, n_tau = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"grid must look like LxT, got {text!r}") from None
    return make_grid(n_lambda, n_tau)


@dataclass(frozen=True)
class RngStream:
    """Seed plus stream id; equal pairs give equal draw sequences.

    Streams are derived with `numpy.random.SeedSequence` spawn keys, so
    replication ``k`` gets the same numbers whichever worker runs it.
    """

    seed: int
    stream: tuple[int, ...] | int = field(default=0)

    def generator(self) -> np.random.Generator:
        key = self.stream if isinstance(self.stream, tuple) else (self.stream,)
        ss = np.random.SeedSequence(entropy=int(self.seed) % 2**64,
                                    spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, *key: int) -> "RngStream":
        base = self.stream if isinstance(self.stream, tuple) else (self.stream,)
        return RngStream(self.seed, tuple(base) + tuple(key))
