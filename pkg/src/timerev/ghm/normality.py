"""Jarque-Bera and Shapiro-Wilk normality tests.

The Shapiro-Wilk weights and p-value follow Royston's approximation
(Royston 1992, Statistics and Computing 2:117-119; algorithm AS R94, 1995):

* ``m_i = Phi^{-1}((i - 3/8) / (n + 1/4))`` and ``c = m / |m|``;
* with ``u = n**-0.5`` the two most extreme weights are corrected by the
  quintic polynomials `_C1` and `_C2` in ``u``; the rest are rescaled ``m_i``;
* for ``n = 3`` the exact null distribution of ``W`` is used;
* for ``4 <= n <= 11`` ``-log(gamma - log(1 - W))`` is approximately normal
  with ``gamma``, mean and log-sd given by `_G`, `_C3`, `_C4` as polynomials
  in ``n``;
* for ``n >= 12`` ``log(1 - W)`` is approximately normal with mean `_C5` and
  log-sd `_C6` as polynomials in ``log(n)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr, ndtri

_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_G = (-2.273, 0.459)
_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)


def _poly(coef, x):
    return sum(c * x ** i for i, c in enumerate(coef))


def _centered(x, min_len):
    x = np.asarray(x, dtype=float).ravel()
    if x.size < min_len:
        raise ValueError(f"need at least {min_len} observations, got {x.size}")
    d = x - x.mean()
    if not np.any(d):
        raise ValueError("sample has zero variance")
    return x, d


def jarque_bera(x) -> tuple[float, float]:
    """``JB = n/6 * (S**2 + (K - 3)**2 / 4)`` with a chi-square(2) p-value."""
    x, d = _centered(x, 8)
    n = x.size
    m2 = np.mean(d ** 2)
    skew = np.mean(d ** 3) / m2 ** 1.5
    kurt = np.mean(d ** 4) / m2 ** 2
    jb = n / 6.0 * (skew ** 2 + (kurt - 3.0) ** 2 / 4.0)
    # chi-square(2) upper tail
    return float(jb), float(math.exp(-jb / 2.0))


def shapiro_weights(n: int) -> np.ndarray:
    """Royston's approximate Shapiro-Wilk coefficients, ascending order."""
    if n < 3:
        raise ValueError("Shapiro-Wilk needs n >= 3")
    if n == 3:
        return np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
    m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    mm = float(m @ m)
    c = m / math.sqrt(mm)
    u = 1.0 / math.sqrt(n)
    a = np.empty(n)
    an = c[-1] + _poly(_C1, u)
    if n > 5:
        an1 = c[-2] + _poly(_C2, u)
        eps = (mm - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * an ** 2 - 2 * an1 ** 2)
        a[2:-2] = m[2:-2] / math.sqrt(eps)
        a[-2], a[1] = an1, -an1
    else:
        eps = (mm - 2 * m[-1] ** 2) / (1 - 2 * an ** 2)
        a[1:-1] = m[1:-1] / math.sqrt(eps)
    a[-1], a[0] = an, -an
    return a


def shapiro_wilk(x) -> tuple[float, float]:
    """Shapiro-Wilk ``W`` and its Royston p-value (3 <= n <= 5000)."""
    x, d = _centered(x, 3)
    n = x.size
    if n > 5000:
        raise ValueError("Shapiro-Wilk approximation is valid for n <= 5000")
    a = shapiro_weights(n)
    w = float((a @ np.sort(x)) ** 2 / (d @ d))
    w = min(w, 1.0)
    return w, _shapiro_pvalue(w, n)


def _shapiro_pvalue(w: float, n: int) -> float:
    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return max(p, 0.0)
    y = math.log1p(-w) if w < 1 else -math.inf
    if n <= 11:
        gamma = _poly(_G, n)
        if y >= gamma:
            return 1e-99
        y = -math.log(gamma - y)
        mean = _poly(_C3, n)
        sd = math.exp(_poly(_C4, n))
    else:
        ln = math.log(n)
        mean = _poly(_C5, ln)
        sd = math.exp(_poly(_C6, ln))
    if y == -math.inf:
        return 1.0
    return float(ndtr((mean - y) / sd))
