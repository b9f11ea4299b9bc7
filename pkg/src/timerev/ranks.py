"""Empirical distribution transforms and rank-threshold indicators."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

# Levels tau with tau*m within this of an integer count are treated as on the
# rank lattice {k/m}; guards j/N grids against representation error.
_LATTICE_TOL = 1e-9


def rank_counts(window, axis: int = -1) -> np.ndarray:
    """Integer counts ``#{s : X_s <= X_t}`` over the window (ties share the max)."""
    x = np.asarray(window, dtype=float)
    if x.size == 0:
        raise ValueError("window must not be empty")
    return rankdata(x, method="max", axis=axis).astype(np.int64)


def ecdf_values(window) -> np.ndarray:
    """Window-local empirical CDF evaluated at each observation.

    >>> ecdf_values([3, 1, 2]).tolist()
    [1.0, 0.3333333333333333, 0.6666666666666666]
    """
    x = np.asarray(window, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("window must be a non-empty vector")
    return rank_counts(x) / x.size


def _check_taus(taus) -> np.ndarray:
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(taus <= 0) or np.any(taus >= 1):
        raise ValueError("quantile levels must lie in (0, 1)")
    return taus


def count_thresholds(taus, m: int) -> np.ndarray:
    """Largest count ``k`` with ``k/m <= tau`` for each level."""
    taus = _check_taus(taus)
    return np.floor(taus * m + _LATTICE_TOL).astype(np.int64)


def indicator_matrix(ranks, taus) -> np.ndarray:
    """Binary ``(t, tau)`` matrix with entry 1 iff ``F_hat(X_t) <= tau``.

    `ranks` are ECDF values as returned by `ecdf_values`.
    """
    ranks = np.asarray(ranks, dtype=float)
    m = ranks.size
    counts = np.rint(ranks * m).astype(np.int64)
    thresholds = count_thresholds(taus, m)
    return (counts[:, None] <= thresholds[None, :]).astype(np.int8)


def level_codes(counts: np.ndarray, taus, m: int) -> np.ndarray:
    """Index of the first level whose indicator is on, ``len(taus)`` if none.

    ``I{F_hat(X_t) <= tau_j} == (code_t <= j)``, so a single small integer per
    observation encodes the whole indicator row. Requires ascending `taus`.
    """
    thresholds = count_thresholds(taus, m)
    return np.searchsorted(thresholds, counts, side="left").astype(np.int64)
