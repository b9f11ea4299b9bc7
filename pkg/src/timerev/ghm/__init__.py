"""Model-based reversibility screen: AR order selection, normality tests and
Student-t mixed causal/noncausal autoregressions."""

from .ar import ArFit, SingularDesignError, fit_ar, fit_ar_bic
from .mar import (MarConvergenceError, MarModel, fit_mar_restricted,
                  fit_mar_student)
from .normality import jarque_bera, shapiro_wilk
from .procedure import GhmError, GhmTrace, Verdict, ghm_decide

__all__ = [
    "ArFit", "SingularDesignError", "fit_ar", "fit_ar_bic",
    "MarConvergenceError", "MarModel", "fit_mar_restricted", "fit_mar_student",
    "jarque_bera", "shapiro_wilk",
    "GhmError", "GhmTrace", "Verdict", "ghm_decide",
]
