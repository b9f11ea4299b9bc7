"""Mixed causal/noncausal AR(r, s) models with Student-t errors.

With ``y_t = X_t - mu``, ``u_t = y_t - sum_i phi_i y_{t-i}`` and
``v_t = u_t - sum_j psi_j u_{t+j}``, the approximate log-likelihood is::

    sum_{t=r}^{n-s-1} log( f_nu(v_t / sigma) / sigma )

with ``f_nu`` the Student-t density. Both lag polynomials are kept
stationary by mapping unconstrained values through ``tanh`` to partial
autocorrelations and then to AR coefficients. ``nu`` is optimized as
``log(nu - 2)`` and ``sigma`` as ``log(sigma)``.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from ..core import as_array
from .ar import fit_ar

FTOL = 1e-8
_MAX_ROOT_STARTS = 3
_PACF_CLIP = 0.98


class MarConvergenceError(RuntimeError):
    """No start converged; ``best`` holds the best point that was found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass
class MarModel:
    r: int
    s: int
    mu: float
    causal: np.ndarray
    noncausal: np.ndarray
    sigma: float
    nu: float
    loglik: float
    n_obs: int
    restricted: bool = False
    converged: bool = True
    n_starts: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def n_params(self) -> int:
        if self.restricted:
            return self.r + 3
        return self.r + self.s + 3

    @property
    def bic(self) -> float:
        return -2.0 * self.loglik + self.n_params * math.log(self.n_obs)

    def to_dict(self) -> dict:
        return {
            "r": self.r, "s": self.s, "mu": self.mu,
            "causal": self.causal.tolist(), "noncausal": self.noncausal.tolist(),
            "sigma": self.sigma, "nu": self.nu, "loglik": self.loglik,
            "bic": self.bic, "k": self.n_params, "n_obs": self.n_obs,
            "restricted": self.restricted, "converged": self.converged,
        }


def pacf_to_ar(pacf) -> np.ndarray:
    """Partial autocorrelations in (-1, 1) to stationary AR coefficients."""
    phi = np.zeros(0)
    for k, rho in enumerate(np.asarray(pacf, dtype=float), start=1):
        phi = np.append(phi - rho * phi[::-1], rho)
    return phi


def ar_to_pacf(phi) -> np.ndarray:
    """Inverse of `pacf_to_ar` (Levinson step-down)."""
    phi = np.asarray(phi, dtype=float).copy()
    out = np.zeros(phi.size)
    for k in range(phi.size, 0, -1):
        rho = phi[-1]
        out[k - 1] = rho
        if k > 1:
            phi = (phi[:-1] + rho * phi[:-1][::-1]) / (1.0 - rho ** 2)
    return out


def is_stationary(phi) -> bool:
    """All roots of ``1 - sum phi_i z**i`` lie outside the unit circle."""
    # Schur-Cohn: stationary iff every step-down reflection coefficient is in (-1, 1)
    phi = np.asarray(phi, dtype=float).copy()
    while phi.size:
        rho = phi[-1]
        if not abs(rho) < 1.0:
            return False
        phi = (phi[:-1] + rho * phi[:-1][::-1]) / (1.0 - rho ** 2)
    return True


def filter_residuals(x, mu, causal, noncausal) -> np.ndarray:
    """The innovations ``v_t`` for ``t = r..n-s-1``."""
    y = np.asarray(x, dtype=float) - mu
    r, s = len(causal), len(noncausal)
    n = y.size
    u = y[r:].copy()
    for i in range(1, r + 1):
        u -= causal[i - 1] * y[r - i:n - i]
    m = u.size
    v = u[:m - s].copy()
    for j in range(1, s + 1):
        v -= noncausal[j - 1] * u[j:m - s + j]
    return v


def student_loglik(v: np.ndarray, sigma: float, nu: float) -> float:
    z = v / sigma
    const = gammaln((nu + 1) / 2) - gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
    return float(v.size * (const - math.log(sigma))
                 - (nu + 1) / 2 * np.sum(np.log1p(z * z / nu)))


class _Objective:
    """Negative log-likelihood over unconstrained parameters.

    Layout: ``[mu, causal raw (r), noncausal raw (s), log sigma, log(nu-2)]``;
    in restricted mode a single raw block of length ``r`` serves both sides.
    """

    def __init__(self, x, r, s, restricted=False):
        self.x, self.r, self.s, self.restricted = x, r, s, restricted

    def unpack(self, theta):
        r, s = self.r, self.s
        mu = theta[0]
        causal = pacf_to_ar(np.tanh(theta[1:1 + r]))
        if self.restricted:
            noncausal = causal
            rest = theta[1 + r:]
        else:
            noncausal = pacf_to_ar(np.tanh(theta[1 + r:1 + r + s]))
            rest = theta[1 + r + s:]
        return mu, causal, noncausal, math.exp(rest[0]), 2.0 + math.exp(rest[1])

    def pack(self, mu, causal, noncausal, sigma, nu):
        raw = [np.arctanh(np.clip(ar_to_pacf(causal), -_PACF_CLIP, _PACF_CLIP))]
        if not self.restricted:
            raw.append(np.arctanh(np.clip(ar_to_pacf(noncausal), -_PACF_CLIP, _PACF_CLIP)))
        return np.concatenate([[mu], *raw, [math.log(sigma), math.log(max(nu - 2.0, 1e-3))]])

    def __call__(self, theta):
        if not np.all(np.isfinite(theta)) or abs(theta[-1]) > 30 or abs(theta[-2]) > 50:
            return 1e300
        mu, causal, noncausal, sigma, nu = self.unpack(theta)
        v = filter_residuals(self.x, mu, causal, noncausal)
        val = -student_loglik(v, sigma, nu)
        return val if math.isfinite(val) else 1e300


def _root_splits(phi: np.ndarray, r: int):
    """Split the roots of a causal AR polynomial into r causal and the rest noncausal.

    Conjugate pairs stay together. Yields ``(causal, noncausal)`` coefficient
    pairs, preferring the split with the largest-modulus roots causal.
    """
    if phi.size == 0:
        return
    roots = np.roots(np.r_[-phi[::-1], 1.0])
    units, used = [], np.zeros(roots.size, bool)
    for i, z in enumerate(roots):
        if used[i]:
            continue
        used[i] = True
        if abs(z.imag) > 1e-10:
            j = next(k for k in range(roots.size)
                     if not used[k] and abs(roots[k] - z.conjugate()) < 1e-6 * max(1, abs(z)))
            used[j] = True
            units.append([z, roots[j]])
        else:
            units.append([complex(z.real, 0.0)])
    units.sort(key=lambda u: -abs(u[0]))
    found = 0
    for size in range(len(units) + 1):
        for combo in itertools.combinations(range(len(units)), size):
            chosen = [z for i in combo for z in units[i]]
            if len(chosen) != r:
                continue
            rest = [z for i in range(len(units)) if i not in combo for z in units[i]]
            yield _poly_from_roots(chosen), _poly_from_roots(rest)
            found += 1
            if found >= _MAX_ROOT_STARTS:
                return


def _poly_from_roots(roots) -> np.ndarray:
    """AR coefficients of ``prod (1 - z / root)``."""
    poly = np.array([1.0 + 0j])
    for z in roots:
        poly = np.convolve(poly, [1.0, -1.0 / z])
    return -poly[1:].real


def _starts(x, r, s, obj: _Objective, rng) -> list[np.ndarray]:
    mu0 = float(np.mean(x))
    scale = float(np.std(x)) or 1.0
    starts = [obj.pack(mu0, np.zeros(r), np.zeros(s), 0.8 * scale, 6.0)]
    p = r + s
    if p > 0:
        fit = fit_ar(x, p)
        sig = math.sqrt(fit.sigma2) * 0.8
        mu_ls = fit.intercept / (1.0 - fit.coefficients.sum()) \
            if abs(1.0 - fit.coefficients.sum()) > 1e-6 else mu0
        for causal, noncausal in _root_splits(fit.coefficients, r):
            if obj.restricted:
                noncausal = causal
            starts.append(obj.pack(mu_ls, causal, noncausal, sig, 6.0))
    base = starts[-1]
    starts.append(base + rng.normal(scale=0.1, size=base.size))
    return starts


def _optimize(obj, starts):
    best, n_ok = None, 0
    for theta0 in starts:
        res = minimize(obj, theta0, method="L-BFGS-B",
                       options={"ftol": FTOL, "gtol": 1e-6, "maxiter": 2000})
        ok = bool(res.success) and res.fun < 1e299
        n_ok += ok
        if best is None or (ok, -res.fun) > (best[1], -best[0].fun):
            best = (res, ok)
    res, ok = best
    if not ok:
        # L-BFGS-B line-search stalls are common with numerical gradients
        res = minimize(obj, res.x, method="Nelder-Mead",
                       options={"fatol": FTOL, "xatol": 1e-7, "maxiter": 20000})
        ok = bool(res.success) and res.fun < 1e299
    return res, ok


def _start_rng(x, r, s, restricted):
    key = zlib.crc32(np.ascontiguousarray(x).tobytes())
    return np.random.default_rng([key, r, s, int(restricted)])


def _fit(x, r, s, restricted, extra_starts=()):
    x = as_array(x)
    if r < 0 or s < 0:
        raise ValueError("orders must be non-negative")
    if x.size <= r + s + 4:
        raise ValueError(f"need n > r + s + 4 = {r + s + 4}")
    obj = _Objective(x, r, s, restricted)
    starts = _starts(x, r, s, obj, _start_rng(x, r, s, restricted))
    starts += [obj.pack(*p) for p in extra_starts]
    res, ok = _optimize(obj, starts)
    mu, causal, noncausal, sigma, nu = obj.unpack(res.x)
    model = MarModel(r, s, float(mu), causal, noncausal.copy(), sigma, nu,
                     -float(res.fun), x.size - r - s, restricted, ok, len(starts))
    if not ok:
        raise MarConvergenceError(
            f"MAR({r},{s}) fit did not converge: {res.message}", best=model)
    return model


def fit_mar_student(x, r: int, s: int, starts=()) -> MarModel:
    """Student-t maximum likelihood for MAR(r, s).

    `starts` may add ``(mu, causal, noncausal, sigma, nu)`` starting points.
    """
    return _fit(x, r, s, False, starts)


def fit_mar_restricted(x, q: int, starts=()) -> MarModel:
    """MAR(q, q) with causal and noncausal coefficient vectors constrained equal."""
    return _fit(x, q, q, True, starts)


def model_start(model: MarModel) -> tuple:
    return (model.mu, model.causal, model.noncausal, model.sigma, model.nu)
