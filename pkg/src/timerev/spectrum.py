"""Copula DFTs, the copula rank periodogram and the integrated copula spectrum.

For a window of length ``m`` with indicator sequences ``a^tau_t`` the
integrated estimator at frequency cut ``lambda`` is::

    F(lambda; tau1, tau2) = m**-2 * sum_{s=1}^{S(lambda)} d1(w_s) * conj(d2(w_s))

with ``w_s = 2*pi*s/m`` and ``S(lambda) = floor(lambda*m/(2*pi))``.

Two evaluation routes are provided. ``method="fft"`` forms the product of
batched DFTs and integrates by cumulative sums. ``method="lag"`` (the
default) rewrites the product through integer lag co-occurrence counts,
``d1 conj(d2) = sum_k c12(k) exp(i w k)`` with
``c12(k) = #{t : a1_t = a2_{t+k} = 1}``, and contracts their antisymmetric
and symmetric parts against precomputed sine/cosine kernels. The counts are
exact integers, so reversing time or swapping ``tau1``/``tau2`` negates the
imaginary part bit-for-bit. The same kernels serve every subsample block.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Literal, Optional

import numpy as np

from .core import EvaluationGrid, as_array
from .ranks import indicator_matrix, level_codes, rank_counts, ecdf_values

# lambda*m/(2*pi) within this of an integer includes that boundary frequency
_FREQ_TOL = 1e-9

# bincount workspace per batch of blocks (number of int64 bins)
_BATCH_BINS = 1 << 22


@dataclass(frozen=True)
class CopulaDft:
    """DFTs ``d^tau(2*pi*s/m)`` for ``s = 0..m-1``; ``values`` is ``(n_tau, m)``."""

    values: np.ndarray
    taus: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class IcsSurface:
    """Integrated copula spectrum on a grid, indexed ``[lambda, tau1, tau2]``.

    ``start`` is ``None`` for a full-sample surface, else the block offset.
    """

    values: np.ndarray
    grid: EvaluationGrid
    m: int
    start: Optional[int] = None

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag


def frequency_cutoffs(lambdas, m: int) -> np.ndarray:
    """Number of Fourier frequencies ``2*pi*s/m`` (s >= 1) that are ``<= lambda``."""
    lam = np.asarray(lambdas, dtype=float)
    s = np.floor(lam * m / (2 * np.pi) + _FREQ_TOL).astype(np.int64)
    return np.clip(s, 0, m - 1)


def copula_dft(window, taus) -> CopulaDft:
    """Batched DFT of the rank-indicator sequences, one row per level."""
    x = as_array(window)
    if x.size < 2:
        raise ValueError("window must contain at least 2 observations")
    ind = indicator_matrix(ecdf_values(x), taus)
    return CopulaDft(np.fft.fft(ind.T.astype(float), axis=1),
                     np.asarray(taus, dtype=float))


def copula_periodogram(dft: CopulaDft, j1: int, j2: int, s: int) -> complex:
    """``I^{tau1,tau2}(w_s) = d1(w_s) d2(-w_s) / (2*pi*m)`` by level index."""
    m = dft.m
    d1 = dft.values[j1, s % m]
    d2_neg = np.conj(dft.values[j2, s % m])
    return complex(d1 * d2_neg / (2 * np.pi * m))


def periodogram_matrix(dft: CopulaDft) -> np.ndarray:
    """All periodogram values as an ``(m, n_tau, n_tau)`` array."""
    d = dft.values.T
    return d[:, :, None] * np.conj(d[:, None, :]) / (2 * np.pi * dft.m)


@lru_cache(maxsize=64)
def _lag_kernels(lambdas: bytes, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sine/cosine kernels ``sum_{s=1}^{S} trig(2*pi*s*k/m)`` for k = 1..m-1."""
    cut = frequency_cutoffs(np.frombuffer(lambdas), m)
    s = np.arange(1, m)
    k = np.arange(1, m)
    # reduce s*k mod m first so the angle stays in [0, 2*pi)
    angle = 2 * np.pi * (np.outer(s, k) % m) / m
    sin_cum = np.vstack([np.zeros(m - 1), np.cumsum(np.sin(angle), axis=0)])
    cos_cum = np.vstack([np.zeros(m - 1), np.cumsum(np.cos(angle), axis=0)])
    sin_k = np.ascontiguousarray(sin_cum[cut])
    cos_k = np.ascontiguousarray(cos_cum[cut])
    for arr in (sin_k, cos_k, cut):
        arr.setflags(write=False)
    return sin_k, cos_k, cut


@lru_cache(maxsize=16)
def _pair_index(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ti, tj = np.triu_indices(m, k=1)
    return ti, tj, tj - ti - 1


def _lag_histograms(codes: np.ndarray, n_levels: int) -> np.ndarray:
    """Counts ``H[b, k-1, p, q] = #{t : code_t = p, code_{t+k} = q}``."""
    n_blocks, m = codes.shape
    ti, tj, lag = _pair_index(m)
    q2 = n_levels * n_levels
    base = (np.arange(n_blocks)[:, None] * (m - 1) + lag[None, :]) * q2
    idx = base + codes[:, ti] * n_levels + codes[:, tj]
    hist = np.bincount(idx.ravel(), minlength=n_blocks * (m - 1) * q2)
    return hist.reshape(n_blocks, m - 1, n_levels, n_levels)


def _cumulate(arr: np.ndarray, n_tau: int) -> np.ndarray:
    return np.cumsum(np.cumsum(arr, axis=-2), axis=-1)[..., :n_tau, :n_tau]


def _imag_from_codes(codes: np.ndarray, grid: EvaluationGrid) -> np.ndarray:
    """Imaginary surfaces ``(n_blocks, n_lambda, n_tau, n_tau)`` from level codes."""
    n_blocks, m = codes.shape
    n_tau = grid.taus.size
    n_levels = n_tau + 1
    sin_k, _, _ = _lag_kernels(grid.lambdas.tobytes(), m)
    hist = _lag_histograms(codes, n_levels)
    anti = (hist - hist.transpose(0, 1, 3, 2)).astype(float)
    proj = np.matmul(sin_k, anti.reshape(n_blocks, m - 1, n_levels * n_levels))
    g = _cumulate(proj.reshape(n_blocks, -1, n_levels, n_levels), n_tau)
    return 0.5 * (g - g.transpose(0, 1, 3, 2)) / (m * m)


def _real_from_codes(codes: np.ndarray, grid: EvaluationGrid) -> np.ndarray:
    n_blocks, m = codes.shape
    n_tau = grid.taus.size
    n_levels = n_tau + 1
    _, cos_k, cut = _lag_kernels(grid.lambdas.tobytes(), m)
    hist = _lag_histograms(codes, n_levels)
    sym = (hist + hist.transpose(0, 1, 3, 2)).astype(float)
    proj = np.matmul(cos_k, sym.reshape(n_blocks, m - 1, n_levels * n_levels))
    g = _cumulate(proj.reshape(n_blocks, -1, n_levels, n_levels), n_tau)
    # lag-0 term: #{t : code_t <= min(j1, j2)} once per included frequency
    level_counts = np.stack([np.bincount(c, minlength=n_levels) for c in codes])
    on = np.cumsum(level_counts, axis=1)[:, :n_tau]
    jj = np.arange(n_tau)
    c0 = on[:, np.minimum.outer(jj, jj)]
    g = g + cut[None, :, None, None] * c0[:, None, :, :]
    g = 0.5 * (g + g.transpose(0, 1, 3, 2))
    return g / (m * m)


def window_codes(windows: np.ndarray, grid: EvaluationGrid) -> np.ndarray:
    """Level codes for each row of a ``(n_blocks, m)`` array of windows."""
    windows = np.atleast_2d(windows)
    m = windows.shape[1]
    return level_codes(rank_counts(windows, axis=1), grid.taus, m)


def _fft_surface(x: np.ndarray, grid: EvaluationGrid) -> np.ndarray:
    m = x.size
    dft = copula_dft(x, grid.taus)
    prod = periodogram_matrix(dft) * (2 * np.pi * m)
    cum = np.concatenate([np.zeros((1,) + prod.shape[1:], complex),
                          np.cumsum(prod[1:], axis=0)])
    return cum[frequency_cutoffs(grid.lambdas, m)] / (m * m)


def integrated_spectrum(window, grid: EvaluationGrid,
                        method: Literal["lag", "fft"] = "lag",
                        start: Optional[int] = None) -> IcsSurface:
    """Integrated copula spectrum estimate of `window` on every grid point.

    Ranks are local to `window`, so passing a block ``x[t:t+b]`` gives the
    subsample estimator for that block.
    """
    x = as_array(window)
    m = x.size
    if m < 2:
        raise ValueError("window must contain at least 2 observations")
    if method == "fft":
        values = _fft_surface(x, grid)
    elif method == "lag":
        codes = window_codes(x[None, :], grid)
        values = _real_from_codes(codes, grid)[0] + 1j * _imag_from_codes(codes, grid)[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    return IcsSurface(values, grid, m, start)


def batch_size(m: int, n_tau: int) -> int:
    """Blocks per batch; depends only on the window shape, never on workers."""
    per_block = (m - 1) * (n_tau + 1) ** 2 + m * (m - 1) // 2
    return max(1, _BATCH_BINS // per_block)


def block_imag_max(x, b: int, grid: EvaluationGrid, starts=None
                   ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(starts, max |Im F|)`` for batches of length-`b` blocks of `x`."""
    x = as_array(x)
    if starts is None:
        starts = np.arange(x.size - b + 1)
    starts = np.asarray(starts, dtype=np.int64)
    step = batch_size(b, grid.taus.size)
    offsets = np.arange(b)
    for lo in range(0, starts.size, step):
        chunk = starts[lo:lo + step]
        windows = x[chunk[:, None] + offsets[None, :]]
        imag = _imag_from_codes(window_codes(windows, grid), grid)
        yield chunk, np.abs(imag).reshape(chunk.size, -1).max(axis=1)
