"""Acceptance suite: one pass/fail line per criterion, at the stated tolerances.

Run alone with ``pytest tests/test_acceptance.py -s``; the summary section at
the end of any pytest run collects the lines.
"""

import json
import os
import time

import numpy as np
import pytest

from oracles import ics_brute
from ghm_helpers import causal_ar, noncausal_ar1

from timerev.benchmark import replication
from timerev.cli import main
from timerev.core import default_grid
from timerev.datasets import DATA_DIR_ENV, registry
from timerev.detrend import hp_filter
from timerev.ghm import Verdict, ghm_decide
from timerev.processes import Model, simulate_values
from timerev.reversibility import SubsampleConfig, rule_of_thumb_block, subsample_test
from timerev.spectrum import integrated_spectrum

REPS = 200
SIZE_ENVELOPE = 0.08
ALL_METHODS = ["ICS", "GHM1", "GHM2"]

# reference p-values for the climate panel, matched at +-0.02
CLIMATE_P = {"GLO": 0.7480, "GL": 0.9320, "GO": 0.0291, "SA": 0.2910, "GHG": 0.9900,
             "N2O": 0.9900, "GCAG": 0.4470, "GISTEMP": 0.4270, "GMSL": 0.7910,
             "SOI": 0.5630, "NAO": 0.7810, "PDO": 0.7790, "NH": 0.1490, "SH": 0.0000}

BLOCK_PAIRS = [(134, 32), (1644, 256), (1608, 256), (852, 128), (2016, 256), (516, 128)]


@pytest.fixture(scope="module")
def bench():
    """Replication outcomes keyed by (model, n); seeds matched across n."""
    plan = {("PBAR", 200): ALL_METHODS, ("NBAR", 200): ALL_METHODS,
            ("QAR1", 100): ["ICS"], ("QAR1", 200): ["ICS"], ("QAR1", 500): ALL_METHODS}
    return {key: [replication(key[0], key[1], k, 0, methods) for k in range(REPS)]
            for key, methods in plan.items()}


def _freq(rows, method):
    return sum(1 for r in rows if r[method]) / len(rows)


def _failures(rows, method):
    return sum(1 for r in rows if r[method] is None)


def test_oracle_equivalence(record_criterion):
    rng = np.random.default_rng(20240101)
    grid = default_grid()
    t0 = time.perf_counter()
    worst = {"fft": 0.0, "lag": 0.0}
    for i in range(50):
        n = (16, 32, 48, 64)[i % 4]
        x = rng.standard_normal(n)
        if i % 5 == 0:
            x = np.round(x, 1)  # exercise ties
        ref = ics_brute(x, grid.lambdas.size, grid.taus)
        for method in worst:
            err = np.abs(integrated_spectrum(x, grid, method).values - ref).max()
            worst[method] = max(worst[method], err)
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-9 and elapsed < 60
    record_criterion("oracle equivalence", ok,
                     f"max err fft={worst['fft']:.2e} lag={worst['lag']:.2e}, {elapsed:.1f}s")
    assert ok


def test_structural_invariants(record_criterion):
    rng = np.random.default_rng(7)
    grid = default_grid()
    t0 = time.perf_counter()
    diag = pair = 0.0
    monotone_ok = reversal_ok = True
    for i in range(100):
        n = int(rng.integers(48, 200))
        x = rng.standard_normal(n) if i % 2 else rng.standard_t(3, n)
        im = integrated_spectrum(x, grid).imag
        diag = max(diag, np.abs(np.diagonal(im, axis1=1, axis2=2)).max())
        pair = max(pair, np.abs(im + im.transpose(0, 2, 1)).max())

        cfg = SubsampleConfig(rule_of_thumb_block(n), grid)
        base = subsample_test(x, cfg)
        moved = subsample_test(x ** 3 + x, cfg)
        monotone_ok &= (moved.statistic == base.statistic and moved.p_value == base.p_value
                        and np.array_equal(moved.block_stats, base.block_stats)
                        and moved.argmax_index == base.argmax_index)
        rev = subsample_test(x[::-1], cfg)
        reversal_ok &= rev.statistic == base.statistic and rev.p_value == base.p_value
    elapsed = time.perf_counter() - t0
    ok = (diag <= 1e-12 and pair <= 1e-12 and monotone_ok and reversal_ok
          and elapsed < 120)
    record_criterion("structural invariants", ok,
                     f"diag={diag:.1e} pair={pair:.1e} monotone={monotone_ok} "
                     f"reversal={reversal_ok}, {elapsed:.1f}s")
    assert ok


def test_block_rule(record_criterion):
    got = [(n, rule_of_thumb_block(n)) for n, _ in BLOCK_PAIRS]
    rows = [(e.abbreviation, rule_of_thumb_block(e.expected_n), e.expected_b)
            for e in registry()]
    ok = got == BLOCK_PAIRS and all(r == b for _, r, b in rows)
    record_criterion("block rule", ok,
                     f"{len(BLOCK_PAIRS)} distinct pairs, {len(rows)} registry rows")
    assert ok


def test_size(bench, record_criterion):
    freqs = {m: _freq(bench[(m, 200)], "ICS") for m in ("PBAR", "NBAR")}
    ok = all(f <= SIZE_ENVELOPE for f in freqs.values())
    record_criterion("ICS size on reversible processes", ok,
                     ", ".join(f"{m} n=200: {f:.3f}" for m, f in freqs.items())
                     + f" (limit {SIZE_ENVELOPE})")
    assert ok


def test_power(bench, record_criterion):
    freqs = [_freq(bench[("QAR1", n)], "ICS") for n in (100, 200, 500)]
    ok = freqs[2] >= 0.5 and freqs[0] < freqs[1] < freqs[2]
    record_criterion("ICS power on QAR1", ok,
                     "n=100/200/500: " + "/".join(f"{f:.3f}" for f in freqs))
    assert ok


def test_ghm_direction(bench, record_criterion):
    qar = bench[("QAR1", 500)]
    ics = _freq(qar, "ICS")
    ghm_power = {m: _freq(qar, m) for m in ("GHM1", "GHM2")}
    ghm_size = {(model, m): _freq(bench[(model, 200)], m)
                for model in ("PBAR", "NBAR") for m in ("GHM1", "GHM2")}
    fails = sum(_failures(bench[k], "GHM1") for k in [("QAR1", 500), ("PBAR", 200), ("NBAR", 200)])
    ok = (all(f < ics for f in ghm_power.values())
          and all(f > SIZE_ENVELOPE for f in ghm_size.values()))
    detail = (f"QAR1 ICS={ics:.3f} " + " ".join(f"{m}={f:.3f}" for m, f in ghm_power.items())
              + "; " + " ".join(f"{a} {m}={f:.3f}" for (a, m), f in ghm_size.items())
              + f"; fit failures={fails}")
    record_criterion("GHM comparative direction", ok, detail)
    assert ok


def test_climate_panel(tmp_path, record_criterion):
    directory = os.environ.get(DATA_DIR_ENV)
    if not directory:
        record_criterion("climate panel", None, f"{DATA_DIR_ENV} not set")
        pytest.skip("no climate data supplied")
    out = tmp_path / "climate.json"
    code = main(["climate", "--data-dir", directory, "--out", str(out)])
    rows = {r["abbreviation"]: r["p_value"] for r in json.loads(out.read_text())["rows"]}
    missing = sorted(set(CLIMATE_P) - {k for k, v in rows.items() if v is not None})
    qualitative = (not missing and rows["GO"] < 0.05 and rows["SH"] <= 0.001
                   and all(p > 0.05 for k, p in rows.items() if k not in ("GO", "SH")))
    off = {k: rows[k] for k in CLIMATE_P if k in rows and rows[k] is not None
           and abs(rows[k] - CLIMATE_P[k]) > 0.02}
    ok = code == 0 and qualitative and not off
    record_criterion("climate panel", ok,
                     f"missing={missing} outside +-0.02: {off or 'none'}")
    assert ok


def test_hp_filter(record_criterion):
    rng = np.random.default_rng(3)
    affine_exact = True
    for n in (10, 64, 500):
        y = 5.0 - 0.125 * np.arange(n)
        for lam in (1.0, 100.0, 14400.0, 1e10):
            trend, cycle = hp_filter(y, lam)
            affine_exact &= np.array_equal(trend, y) and not np.any(cycle)
    # arbitrary-coefficient lines are affine only up to input rounding
    affine_round = 0.0
    for _ in range(20):
        y = rng.normal() + rng.normal() * np.arange(int(rng.integers(4, 300)))
        affine_round = max(affine_round, np.abs(hp_filter(y, 14400.0)[1]).max()
                           / max(1.0, np.abs(y).max()))
    dense = 0.0
    for _ in range(40):
        n = int(rng.integers(4, 51))
        y = rng.standard_normal(n).cumsum()
        lam = float(rng.choice([1.0, 100.0, 1600.0, 14400.0]))
        d = np.diff(np.eye(n), 2, axis=0)
        ref = np.linalg.solve(np.eye(n) + lam * d.T @ d, y)
        dense = max(dense, np.abs(hp_filter(y, lam)[0] - ref).max())
    ols = 0.0
    for n in (12, 50, 200):
        t = np.arange(n, dtype=float)
        y = 1.0 + 0.2 * t + rng.standard_normal(n)
        x = np.column_stack([np.ones(n), t])
        resid = y - x @ np.linalg.lstsq(x, y, rcond=None)[0]
        ols = max(ols, np.abs(hp_filter(y, 1e10)[1] - resid).max())
    ok = affine_exact and affine_round <= 1e-12 and dense <= 1e-9 and ols <= 1e-4
    record_criterion("HP filter", ok,
                     f"affine bit-exact={affine_exact} (rounded lines {affine_round:.1e}), "
                     f"dense err={dense:.1e}, OLS limit err={ols:.1e}")
    assert ok


def test_ghm_sanity(record_criterion):
    gauss = 0
    for k in range(100):
        rng = np.random.default_rng(1000 + k)
        x = causal_ar([0.5, -0.3], 1000, rng.standard_normal)
        gauss += ghm_decide(x).verdict is Verdict.REVERSIBLE
    noncausal = 0
    for k in range(31):
        rng = np.random.default_rng(5000 + k)
        x = noncausal_ar1(0.7, 500, lambda size: rng.standard_t(3, size))
        noncausal += ghm_decide(x).verdict is Verdict.IRREVERSIBLE
    step1 = 0
    for k in range(100):
        x = simulate_values(Model.QAR1, 500, 0, (Model.QAR1.code, k))
        trace = ghm_decide(x)
        step1 += trace.exit_step == 1 and trace.verdict is Verdict.REVERSIBLE
    ok = gauss >= 85 and noncausal > 31 / 2 and step1 > 50
    record_criterion("GHM pipeline sanity", ok,
                     f"Gaussian AR(2) reversible {gauss}/100, noncausal t(3) AR(1) "
                     f"irreversible {noncausal}/31, QAR1 step-1 reversible {step1}/100")
    assert ok
