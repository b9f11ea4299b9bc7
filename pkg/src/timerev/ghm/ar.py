"""Causal AR(p) least-squares fits with BIC order selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import as_array


class SingularDesignError(ValueError):
    """The AR regression design is rank deficient (e.g. constant series)."""


@dataclass
class ArFit:
    p: int
    intercept: float
    coefficients: np.ndarray
    residuals: np.ndarray
    bic: float
    sigma2: float


def _design(x: np.ndarray, p: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    n = x.size
    cols = [np.ones(n - start)] + [x[start - i:n - i] for i in range(1, p + 1)]
    return np.column_stack(cols), x[start:]


def _ls(x, p, start):
    z, y = _design(x, p, start)
    if np.linalg.matrix_rank(z) < z.shape[1] or not np.ptp(y) > 0:
        raise SingularDesignError(f"singular AR({p}) design")
    beta, *_ = np.linalg.lstsq(z, y, rcond=None)
    resid = y - z @ beta
    return beta, resid


def _gaussian_bic(resid: np.ndarray, k: int) -> float:
    m = resid.size
    sigma2 = float(resid @ resid) / m
    loglik = -0.5 * m * (np.log(2 * np.pi * sigma2) + 1.0)
    return -2.0 * loglik + k * np.log(m)


def fit_ar(x, p: int) -> ArFit:
    """Least-squares AR(p) with intercept on observations ``p..n-1``."""
    x = as_array(x)
    beta, resid = _ls(x, p, p)
    return ArFit(p, float(beta[0]), beta[1:], resid,
                 _gaussian_bic(resid, p + 2), float(resid @ resid) / resid.size)


def fit_ar_bic(x, p_max: int = 5) -> ArFit:
    """Pick ``p`` in ``0..p_max`` by Gaussian BIC, then refit it.

    Orders are compared on the common sample ``t >= p_max`` so every
    candidate's BIC is built from the same observations.
    """
    x = as_array(x)
    if x.size <= 2 * p_max:
        raise ValueError(f"need n > {2 * p_max} for p_max={p_max}")
    bics = []
    for p in range(p_max + 1):
        _, resid = _ls(x, p, p_max)
        bics.append(_gaussian_bic(resid, p + 2))
    return fit_ar(x, int(np.argmin(bics)))
