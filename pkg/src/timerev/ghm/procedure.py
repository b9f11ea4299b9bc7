"""The five-step model-based reversibility screen.

1. AR(p) by BIC over ``p = 0..p_max``; ``p = 0`` means i.i.d., hence reversible.
2. Shapiro-Wilk and Jarque-Bera on the AR residuals; Gaussian means reversible.
3. Student-t MAR(r, s) for every split of ``P`` (``p`` rounded up to even);
   the best split with ``r != s`` means irreversible.
4. Refit with ``r = s`` and equal causal/noncausal coefficients.
5. Strategy 1 compares BICs; strategy 2 runs a likelihood-ratio test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Optional

import numpy as np
from scipy.stats import chi2

from ..core import as_array
from .ar import ArFit, fit_ar_bic
from .mar import (MarConvergenceError, MarModel, fit_mar_restricted,
                  fit_mar_student, model_start)
from .normality import jarque_bera, shapiro_wilk


class Verdict(str, Enum):
    REVERSIBLE = "Reversible"
    IRREVERSIBLE = "Irreversible"


class GhmError(RuntimeError):
    """A fit failed; ``trace`` holds everything computed up to the failure."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass
class GhmTrace:
    strategy: int
    alpha: float
    ar_fit: Optional[ArFit] = None
    shapiro: Optional[tuple[float, float]] = None
    jarque_bera: Optional[tuple[float, float]] = None
    gaussian: Optional[bool] = None
    P: Optional[int] = None
    candidates: list[MarModel] = field(default_factory=list)
    failed: list[tuple[int, int, str]] = field(default_factory=list)
    selected: Optional[MarModel] = None
    restricted: Optional[MarModel] = None
    bic_irreversible: Optional[bool] = None
    lrt_statistic: Optional[float] = None
    lrt_df: Optional[int] = None
    lrt_p_value: Optional[float] = None
    verdicts: dict[int, Verdict] = field(default_factory=dict)
    exit_step: Optional[int] = None
    reason: str = ""
    error: Optional[str] = None

    @property
    def verdict(self) -> Optional[Verdict]:
        return self.verdicts.get(self.strategy)

    def _finish(self, step, verdict, reason):
        self.exit_step = step
        self.reason = reason
        self.verdicts = {1: verdict, 2: verdict}
        return self

    def to_dict(self) -> dict:
        out = {
            "strategy": self.strategy,
            "alpha": self.alpha,
            "verdict": self.verdict.value if self.verdict else None,
            "verdicts": {str(k): v.value for k, v in self.verdicts.items()},
            "exit_step": self.exit_step,
            "reason": self.reason,
            "error": self.error,
        }
        if self.ar_fit is not None:
            out["ar"] = {"p": self.ar_fit.p, "intercept": self.ar_fit.intercept,
                         "coefficients": self.ar_fit.coefficients.tolist(),
                         "bic": self.ar_fit.bic}
        if self.shapiro is not None:
            out["normality"] = {
                "shapiro_wilk": {"W": self.shapiro[0], "p_value": self.shapiro[1]},
                "jarque_bera": {"statistic": self.jarque_bera[0],
                                "p_value": self.jarque_bera[1]},
                "gaussian": self.gaussian,
            }
        if self.P is not None:
            out["P"] = self.P
            out["candidates"] = [m.to_dict() for m in self.candidates]
            out["failed"] = [list(f) for f in self.failed]
        if self.selected is not None:
            out["selected"] = {"r": self.selected.r, "s": self.selected.s}
        if self.restricted is not None:
            out["restricted"] = self.restricted.to_dict()
            out["strategy1"] = {"bic_unrestricted": self.selected.bic,
                                "bic_restricted": self.restricted.bic,
                                "irreversible": self.bic_irreversible}
            out["strategy2"] = {"lrt": self.lrt_statistic, "df": self.lrt_df,
                                "p_value": self.lrt_p_value}
        return out


def _gaussian(sw_p, jb_p, alpha, rule):
    if rule == "both":
        return sw_p >= alpha and jb_p >= alpha
    if rule == "either":
        return sw_p >= alpha or jb_p >= alpha
    raise ValueError(f"unknown normality rule {rule!r}")


def ghm_decide(series, strategy: int = 1, alpha: float = 0.05, p_max: int = 5,
               normality: Literal["both", "either"] = "both") -> GhmTrace:
    """Run the screen; the trace carries the outcome of both strategies.

    ``normality="both"`` declares residuals Gaussian only when neither test
    rejects; ``"either"`` when at least one does not.
    """
    if strategy not in (1, 2):
        raise ValueError("strategy must be 1 or 2")
    if normality not in ("both", "either"):
        raise ValueError(f"unknown normality rule {normality!r}")
    x = as_array(series)
    if x.size < 50:
        raise ValueError("GHM procedure needs n >= 50")
    trace = GhmTrace(strategy, alpha)

    trace.ar_fit = fit_ar_bic(x, p_max)
    p = trace.ar_fit.p
    if p == 0:
        return trace._finish(1, Verdict.REVERSIBLE, "iid selected")

    resid = trace.ar_fit.residuals
    trace.shapiro = shapiro_wilk(resid)
    trace.jarque_bera = jarque_bera(resid)
    trace.gaussian = _gaussian(trace.shapiro[1], trace.jarque_bera[1], alpha, normality)
    if trace.gaussian:
        return trace._finish(2, Verdict.REVERSIBLE, "gaussian residuals")

    P = p if p % 2 == 0 else p + 1
    trace.P = P
    for r in range(P + 1):
        try:
            trace.candidates.append(fit_mar_student(x, r, P - r))
        except MarConvergenceError as exc:
            trace.failed.append((r, P - r, str(exc)))
    if not trace.candidates:
        trace.error = "no MAR candidate converged"
        raise GhmError(trace.error, trace)
    best = max(trace.candidates, key=lambda m: m.loglik)
    trace.selected = best
    if best.r != best.s:
        return trace._finish(3, Verdict.IRREVERSIBLE, f"r={best.r} != s={best.s}")

    q = best.r
    try:
        restricted = fit_mar_restricted(
            x, q, starts=[(best.mu, best.causal, best.causal, best.sigma, best.nu),
                          (best.mu, best.noncausal, best.noncausal, best.sigma, best.nu)])
        if restricted.loglik > best.loglik:
            # nested model cannot beat the unrestricted optimum; re-polish it
            refit = fit_mar_student(x, q, q, starts=[model_start(restricted)])
            if refit.loglik > best.loglik:
                trace.candidates[trace.candidates.index(best)] = refit
                best = trace.selected = refit
    except MarConvergenceError as exc:
        trace.error = str(exc)
        raise GhmError(trace.error, trace) from exc
    trace.restricted = restricted

    trace.bic_irreversible = best.bic < restricted.bic
    trace.lrt_statistic = 2.0 * (best.loglik - restricted.loglik)
    trace.lrt_df = q
    trace.lrt_p_value = float(chi2.sf(max(trace.lrt_statistic, 0.0), q))
    trace.exit_step = 5
    trace.verdicts = {
        1: Verdict.IRREVERSIBLE if trace.bic_irreversible else Verdict.REVERSIBLE,
        2: Verdict.IRREVERSIBLE if trace.lrt_p_value < alpha else Verdict.REVERSIBLE,
    }
    trace.reason = "strategy comparison"
    return trace
