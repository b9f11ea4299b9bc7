"""Model-free tests of pairwise time-reversibility based on the integrated
copula spectrum, with a model-based baseline, simulators and HP detrending."""

__version__ = "0.1.0"

from .core import EvaluationGrid, RngStream, Series, default_grid, make_grid
from .detrend import HpConfig, hp_filter
from .processes import Model, SimSpec, simulate, simulate_values
from .reversibility import (SampleTooShortError, SubsampleConfig, TestReport,
                            ics_test, reject, rule_of_thumb_block, subsample_test,
                            test_statistic)
from .spectrum import IcsSurface, copula_dft, copula_periodogram, integrated_spectrum

__all__ = [
    "EvaluationGrid", "RngStream", "Series", "default_grid", "make_grid",
    "HpConfig", "hp_filter", "Model", "SimSpec", "simulate", "simulate_values",
    "SampleTooShortError", "SubsampleConfig", "TestReport", "ics_test", "reject",
    "rule_of_thumb_block", "subsample_test", "test_statistic",
    "IcsSurface", "copula_dft", "copula_periodogram", "integrated_spectrum",
]
