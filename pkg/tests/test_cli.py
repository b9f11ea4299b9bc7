import csv
import io
import json

import numpy as np
import pytest

from timerev import cli
from timerev.datasets import registry


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_series(path, values):
    with open(path, "w") as fh:
        fh.write("date,value\n")
        for i, v in enumerate(values):
            fh.write(f"{i},{float(v)!r}\n")
    return str(path)


@pytest.fixture
def qar_file(tmp_path, capsys):
    path = tmp_path / "qar.csv"
    code, _, _ = run(capsys, "simulate", "--model", "QAR1", "--n", "150", "--seed", "5",
                     "--out", str(path))
    assert code == 0
    return str(path)


def test_test_json_schema(capsys, qar_file):
    code, out, _ = run(capsys, "test", "--input", qar_file, "--workers", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "timerev.test/1"
    assert doc["n"] == 150 and doc["b"] == 32
    assert set(doc["argmax"]) == {"lambda", "tau1", "tau2"}
    assert doc["decision"] in ("reject", "do not reject")
    assert sum(doc["block_histogram"]["counts"]) == 150 - 32 + 1
    assert len(doc["block_stats"]) == 119
    assert "timestamp" in doc["metadata"]


def test_test_is_deterministic_across_workers(capsys, qar_file):
    docs = []
    for workers in ("1", "3"):
        _, out, _ = run(capsys, "test", "--input", qar_file, "--workers", workers)
        doc = json.loads(out)
        doc.pop("metadata")
        docs.append(doc)
    assert docs[0] == docs[1]


def test_constant_series(capsys, tmp_path):
    path = write_series(tmp_path / "c.csv", [2.0] * 60)
    code, out, _ = run(capsys, "test", "--input", path, "--format", "csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["statistic"]) == 0.0
    assert row["decision"] == "do not reject"


def test_short_series_needs_block(capsys, tmp_path):
    path = write_series(tmp_path / "s.csv", list(np.random.default_rng(0).random(10)))
    code, _, err = run(capsys, "test", "--input", path)
    assert code == 2
    assert "sample too short for rule of thumb" in err
    code, out, _ = run(capsys, "test", "--input", path, "--block", "4", "--grid", "5x3")
    assert code == 0
    assert json.loads(out)["b"] == 4


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "test")[0] == 1
    assert run(capsys, "test", "--input", "x.csv", "--alpha", "1.5")[0] == 1
    assert run(capsys, "test", "--input", str(tmp_path / "missing.csv"))[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("value\n1\n\n2\nfoo\n")
    assert run(capsys, "test", "--input", str(bad))[0] == 2
    path = write_series(tmp_path / "c.csv", [1.0] * 80)
    assert run(capsys, "ghm", "--input", path)[0] == 3


def test_hp_option(capsys, tmp_path):
    path = write_series(tmp_path / "lin.csv", list(3.0 + 0.5 * np.arange(60)))
    code, out, _ = run(capsys, "test", "--input", path, "--hp-lambda", "100")
    assert code == 0
    assert json.loads(out)["statistic"] == 0.0


def test_ghm_command(capsys, qar_file):
    code, out, _ = run(capsys, "ghm", "--input", qar_file)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "timerev.ghm/1"
    assert doc["verdict"] in ("Reversible", "Irreversible")
    assert doc["exit_step"] in (1, 2, 3, 5)


def test_simulate_repeatable(capsys):
    _, a, _ = run(capsys, "simulate", "--model", "pbar", "--n", "20", "--seed", "9")
    _, b, _ = run(capsys, "simulate", "--model", "PBAR", "--n", "20", "--seed", "9")
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert len(rows) == 20 and all(0 <= float(r["value"]) <= 1 for r in rows)


def test_benchmark_csv_worker_independent(capsys):
    outs = []
    for workers in ("1", "2"):
        code, out, _ = run(capsys, "benchmark", "--models", "QAR1,PBAR", "--ns", "60",
                           "--reps", "3", "--methods", "ICS,GHM1,GHM2",
                           "--grid", "9x7", "--workers", workers, "--seed", "4")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    rows = list(csv.DictReader(io.StringIO(outs[0])))
    assert len(rows) == 6
    assert set(rows[0]) == {"method", "model", "n", "reps", "rejections", "failures",
                            "frequency", "alpha"}


def test_benchmark_rejects_unknown_method(capsys):
    assert run(capsys, "benchmark", "--methods", "ICS,XYZ", "--reps", "1")[0] == 1


def _populate(directory, skip=()):
    rng = np.random.default_rng(0)
    for entry in registry():
        if entry.abbreviation in skip:
            continue
        write_series(directory / entry.filename,
                     list(rng.standard_normal(entry.expected_n)))


def test_climate_partial_run(capsys, tmp_path, monkeypatch, caplog):
    import timerev.cli as c
    # shrink the pipeline: tiny grid, and only the short yearly series present
    long_ones = {e.abbreviation for e in registry() if e.expected_n > 200}
    _populate(tmp_path, skip=long_ones | {"SA"})
    monkeypatch.setenv("TIMEREV_DATA_DIR", str(tmp_path))
    code, out, _ = run(capsys, "climate", "--grid", "5x7", "--workers", "1")
    assert code == 0
    doc = json.loads(out)
    assert [r["abbreviation"] for r in doc["rows"]] == ["GLO", "GL", "GO", "GHG", "N2O"]
    assert {s["abbreviation"] for s in doc["skipped"]} == long_ones | {"SA"}
    for row in doc["rows"]:
        assert row["n"] == 134 and row["b"] == 32 and 0 <= row["p_value"] <= 1


def test_climate_without_data_dir(capsys, monkeypatch):
    monkeypatch.delenv("TIMEREV_DATA_DIR", raising=False)
    assert run(capsys, "climate")[0] == 2


def test_climate_csv_with_failed_row(capsys, tmp_path, monkeypatch):
    long_ones = {e.abbreviation for e in registry() if e.expected_n > 200}
    _populate(tmp_path, skip=long_ones)
    # shorter than its block length, so the test itself fails for this row
    write_series(tmp_path / "GL.csv", list(np.arange(20.0) % 7))
    monkeypatch.setenv("TIMEREV_DATA_DIR", str(tmp_path))
    code, out, _ = run(capsys, "climate", "--grid", "5x7", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[1]["abbreviation"] == "GL" and rows[1]["error"]
    assert rows[0]["error"] == "" and rows[0]["p_value"]
