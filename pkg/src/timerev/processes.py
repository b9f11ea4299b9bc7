"""Simulators for the beta autoregressions (PBAR, NBAR) and QAR(1).

PBAR ``X_t = 1 - U_t (1 - W_t X_{t-1})`` and NBAR ``X_t = U_t (1 - W_t X_{t-1})``
use ``U ~ Beta(2, 1)``, ``W ~ Beta(1, 1)``; both are time-reversible. QAR(1)
``X_t = 0.1 * Phi^{-1}(U_t) + 1.9 (U_t - 0.5) X_{t-1}`` with uniform ``U_t``
is uncorrelated yet time-irreversible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtri

from .core import RngStream, Series

DEFAULT_BURN_IN = 1000
_TINY = np.nextafter(0.0, 1.0)


class Model(str, Enum):
    PBAR = "PBAR"
    NBAR = "NBAR"
    QAR1 = "QAR1"

    @property
    def code(self) -> int:
        return list(Model).index(self)


def _check_unit(**values):
    for name, v in values.items():
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} outside [0, 1]")


def pbar_step(x_prev: float, u: float, w: float) -> float:
    _check_unit(x_prev=x_prev, u=u, w=w)
    return 1.0 - u * (1.0 - w * x_prev)


def nbar_step(x_prev: float, u: float, w: float) -> float:
    _check_unit(x_prev=x_prev, u=u, w=w)
    return u * (1.0 - w * x_prev)


def qar_step(x_prev: float, u: float) -> float:
    if not 0.0 < u < 1.0:
        raise ValueError(f"u={u} must lie strictly inside (0, 1)")
    return 0.1 * float(ndtri(u)) + 1.9 * (u - 0.5) * x_prev


def beta21(uniform: np.ndarray) -> np.ndarray:
    """Beta(2, 1) by inverse transform: the CDF is ``x**2``."""
    return np.sqrt(uniform)


@dataclass(frozen=True)
class SimSpec:
    model: Model
    n: int
    rng: RngStream
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


def _beta_path(x0, u, w, positive):
    out = np.empty(u.size)
    x = x0
    if positive:
        for t in range(u.size):
            x = 1.0 - u[t] * (1.0 - w[t] * x)
            out[t] = x
    else:
        for t in range(u.size):
            x = u[t] * (1.0 - w[t] * x)
            out[t] = x
    return out


def _qar_path(u):
    noise = 0.1 * ndtri(u)
    slope = 1.9 * (u - 0.5)
    out = np.empty(u.size)
    x = 0.0
    for t in range(u.size):
        x = noise[t] + slope[t] * x
        out[t] = x
    return out


def simulate(spec: SimSpec) -> Series:
    """Draw ``burn_in + n`` steps and keep the last ``n``.

    Draw order from the stream: PBAR/NBAR take ``X_0``, then all ``U``, then all
    ``W``; QAR1 starts at 0 and takes all ``U``.
    """
    rng = spec.rng.generator()
    total = spec.burn_in + spec.n
    if spec.model is Model.QAR1:
        u = rng.uniform(_TINY, 1.0, size=total)
        path = _qar_path(u)
    else:
        x0 = rng.random()
        u = beta21(rng.random(total))
        w = rng.random(total)
        path = _beta_path(x0, u, w, spec.model is Model.PBAR)
    return Series(path[spec.burn_in:], label=spec.model.value)


def simulate_values(model, n: int, seed: int, stream=0,
                    burn_in: int = DEFAULT_BURN_IN) -> np.ndarray:
    return simulate(SimSpec(Model(model), n, RngStream(seed, stream), burn_in)).values
