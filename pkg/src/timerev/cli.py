"""Command-line entry point: ``timerev {test,ghm,simulate,benchmark,climate}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import warnings
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__
from .core import parse_grid
from .datasets import (DATA_DIR_ENV, DataError, data_dir, load_csv, load_entry,
                       prepare, registry)
from .detrend import hp_filter
from .ghm import GhmError, MarConvergenceError, SingularDesignError, ghm_decide
from .processes import DEFAULT_BURN_IN, Model, simulate_values
from .reversibility import (SampleTooShortError, SubsampleConfig, reject,
                            rule_of_thumb_block, subsample_test)
from .benchmark import METHODS, rejection_table

logger = logging.getLogger("timerev")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SCHEMA = "timerev.{}/1"
HIST_BINS = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _metadata() -> dict:
    return {"version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}


def _csv_list(text: str, cast=str) -> list:
    return [cast(part.strip()) for part in text.split(",") if part.strip()]


def _alpha(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _emit(doc: dict, rows: list[dict], fmt: str, out: Optional[str]):
    if fmt == "json":
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_doc(report, alpha: float) -> dict:
    lo, hi = float(report.block_stats.min()), float(report.block_stats.max())
    if hi - lo <= 1e-9 * max(1.0, abs(hi)):
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(report.block_stats, bins=HIST_BINS, range=(lo, hi))
    doc = report.to_dict()
    doc.update({
        "alpha": alpha,
        "decision": "reject" if reject(report, alpha) else "do not reject",
        "block_histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
        "block_stats": report.block_stats.tolist(),
    })
    return doc


def _read_input(args):
    series = load_csv(args.input, args.column)
    if args.hp_lambda is not None:
        _, series = hp_filter(series, args.hp_lambda)
    return series


def cmd_test(args) -> int:
    series = _read_input(args)
    grid = parse_grid(args.grid)
    b = args.block if args.block is not None else rule_of_thumb_block(series.n)
    report = subsample_test(series, SubsampleConfig(b, grid, stride=args.stride),
                            workers=args.workers)
    doc = {"schema": SCHEMA.format("test"), "input": os.path.basename(args.input),
           **_report_doc(report, args.alpha), "metadata": _metadata()}
    row = {k: doc[k] for k in ("n", "b", "statistic", "p_value", "decision")}
    row.update({f"argmax_{k}": v for k, v in doc["argmax"].items()})
    _emit(doc, [row], args.format, args.out)
    return EXIT_OK


def cmd_ghm(args) -> int:
    series = _read_input(args)
    trace = ghm_decide(series, args.strategy, args.alpha, args.p_max, args.normality)
    doc = {"schema": SCHEMA.format("ghm"), "input": os.path.basename(args.input),
           **trace.to_dict(), "metadata": _metadata()}
    row = {"verdict": doc["verdict"], "exit_step": doc["exit_step"],
           "reason": doc["reason"], "p": trace.ar_fit.p}
    _emit(doc, [row], args.format, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    values = simulate_values(args.model, args.n, args.seed, args.stream, args.burn_in)
    rows = [{"t": t, "value": repr(float(v))} for t, v in enumerate(values)]
    doc = {"schema": SCHEMA.format("simulate"), "model": args.model, "n": args.n,
           "seed": args.seed, "stream": args.stream, "burn_in": args.burn_in,
           "values": values.tolist(), "metadata": _metadata()}
    _emit(doc, rows, args.format, args.out)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    grid = parse_grid(args.grid)
    cells = rejection_table(args.models, args.ns, args.reps, args.methods, args.seed,
                            args.alpha, args.workers, grid, args.burn_in)
    rows = [c.row() for c in cells]
    doc = {"schema": SCHEMA.format("benchmark"), "seed": args.seed,
           "grid": args.grid, "rows": rows, "metadata": _metadata()}
    _emit(doc, rows, args.format, args.out)
    return EXIT_OK


def cmd_climate(args) -> int:
    directory = data_dir(args.data_dir)
    if directory is None or not directory.is_dir():
        raise DataError(f"data directory not found; pass --data-dir or set {DATA_DIR_ENV}")
    grid = parse_grid(args.grid)
    rows, skipped = [], []
    for entry in registry(args.manifest):
        row = {"abbreviation": entry.abbreviation, "n": None, "b": entry.expected_b,
               "statistic": None, "p_value": None, "decision": None}
        if args.ghm:
            row.update({"ghm_verdict": None, "ghm_exit_step": None})
        row["error"] = None
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                series = prepare(entry, load_entry(entry, directory))
            for w in caught:
                logger.warning("%s", w.message)
        except DataError as exc:
            logger.warning("skipping %s: %s", entry.abbreviation, exc)
            skipped.append({"abbreviation": entry.abbreviation, "error": str(exc)})
            continue
        try:
            report = subsample_test(series, SubsampleConfig(entry.expected_b, grid),
                                    workers=args.workers)
            row.update(n=series.n, statistic=report.statistic, p_value=report.p_value,
                       decision="reject" if reject(report, args.alpha) else "do not reject")
            if args.ghm:
                trace = ghm_decide(series, args.strategy, args.alpha)
                row.update(ghm_verdict=trace.verdict.value, ghm_exit_step=trace.exit_step)
        except Exception as exc:  # per-dataset failures must not stop the run
            logger.warning("%s failed: %s", entry.abbreviation, exc)
            row["error"] = str(exc)
        rows.append(row)
    doc = {"schema": SCHEMA.format("climate"), "alpha": args.alpha, "rows": rows,
           "skipped": skipped, "metadata": _metadata()}
    _emit(doc, rows, args.format, args.out)
    return EXIT_OK


def _common(p: argparse.ArgumentParser, *, input_: bool = False, grid: bool = False):
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--workers", type=_positive, default=os.cpu_count() or 1)
    if input_:
        p.add_argument("--input", required=True, help="CSV file with a header row")
        p.add_argument("--column", default="value", help="value column name")
        p.add_argument("--hp-lambda", type=float, default=None,
                       help="HP-detrend first and test the cycle")
    if grid:
        p.add_argument("--grid", default="17x31", help="LxT frequency x level counts")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="timerev",
                     description="Copula-spectrum tests of time-reversibility.")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="copula-spectrum subsampling test")
    _common(p, input_=True, grid=True)
    p.add_argument("--block", type=int, default=None, help="override block length b")
    p.add_argument("--stride", type=_positive, default=1)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("ghm", help="model-based five-step screen")
    _common(p, input_=True)
    p.add_argument("--strategy", type=int, choices=(1, 2), default=1)
    p.add_argument("--p-max", type=int, default=5)
    p.add_argument("--normality", choices=("both", "either"), default="both")
    p.set_defaults(func=cmd_ghm)

    p = sub.add_parser("simulate", help="simulate PBAR, NBAR or QAR1")
    _common(p)
    p.add_argument("--model", type=str.upper, choices=[m.value for m in Model],
                   required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    p.set_defaults(func=cmd_simulate, format="csv")

    p = sub.add_parser("benchmark", help="Monte Carlo rejection frequencies")
    _common(p, grid=True)
    p.add_argument("--models", type=lambda s: _csv_list(s, str.upper),
                   default=[m.value for m in Model])
    p.add_argument("--ns", type=lambda s: _csv_list(s, int), default=[100, 200, 500, 1000])
    p.add_argument("--reps", type=_positive, default=1000)
    p.add_argument("--methods", type=lambda s: _csv_list(s, str.upper),
                   default=list(METHODS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    p.set_defaults(func=cmd_benchmark, format="csv")

    p = sub.add_parser("climate", help="test every registered climate series")
    _common(p, grid=True)
    p.add_argument("--data-dir", default=None, help=f"defaults to ${DATA_DIR_ENV}")
    p.add_argument("--manifest", default=None, help="registry manifest (JSON)")
    p.add_argument("--ghm", action="store_true", help="add GHM verdicts")
    p.add_argument("--strategy", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=cmd_climate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DataError, SampleTooShortError) as exc:
        print(f"timerev: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (GhmError, MarConvergenceError, SingularDesignError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"timerev: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"timerev: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
