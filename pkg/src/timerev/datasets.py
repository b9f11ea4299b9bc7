"""Climate dataset registry and CSV ingestion from a local data directory."""

from __future__ import annotations

import csv
import json
import os
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .core import Series
from .detrend import MONTHLY_LAMBDA, YEARLY_LAMBDA, hp_filter
from .reversibility import rule_of_thumb_block

DATA_DIR_ENV = "TIMEREV_DATA_DIR"
_HP_BY_FREQUENCY = {"yearly": YEARLY_LAMBDA, "monthly": MONTHLY_LAMBDA}


class DataError(ValueError):
    """Input data could not be read or validated."""


class LengthMismatchWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DatasetEntry:
    abbreviation: str
    description: str
    period: str
    frequency: str
    detrend: bool
    hp_lambda: Optional[float]
    expected_n: int
    expected_b: int
    value_column: str = "value"
    date_column: Optional[str] = None
    file: Optional[str] = None

    def __post_init__(self):
        if self.frequency not in _HP_BY_FREQUENCY:
            raise ValueError(f"{self.abbreviation}: unknown frequency {self.frequency!r}")
        if self.detrend and self.hp_lambda != _HP_BY_FREQUENCY[self.frequency]:
            raise ValueError(f"{self.abbreviation}: hp_lambda {self.hp_lambda} does not "
                             f"match {self.frequency} data")
        if self.expected_b != rule_of_thumb_block(self.expected_n):
            raise ValueError(f"{self.abbreviation}: expected_b inconsistent with n")

    @property
    def filename(self) -> str:
        return self.file or f"{self.abbreviation}.csv"


def _default_manifest() -> str:
    return resources.files("timerev").joinpath("data/registry.json").read_text("utf-8")


def registry(manifest: Optional[os.PathLike] = None) -> list[DatasetEntry]:
    """Dataset entries from `manifest`, or from the manifest shipped with the package."""
    text = Path(manifest).read_text("utf-8") if manifest else _default_manifest()
    doc = json.loads(text)
    return [DatasetEntry(**entry) for entry in doc["entries"]]


def lookup(abbreviation: str, manifest=None) -> DatasetEntry:
    for entry in registry(manifest):
        if entry.abbreviation.upper() == abbreviation.upper():
            return entry
    raise KeyError(abbreviation)


def load_csv(path, value_column: str = "value", date_column: Optional[str] = None,
             label: Optional[str] = None, interval: str = "none") -> Series:
    """Read one numeric column of a comma-delimited UTF-8 file with a header.

    Values must use a decimal point; blank or non-numeric cells raise
    `DataError` naming the file line.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    values = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if value_column not in header:
            raise DataError(f"{path}: no column {value_column!r} in header {header}")
        if date_column is not None and date_column not in header:
            raise DataError(f"{path}: no column {date_column!r} in header {header}")
        col = header.index(value_column)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {line} has {len(row)} fields, expected "
                                f"{len(header)} (use '.' as decimal separator)")
            cell = row[col].strip()
            if not cell:
                raise DataError(f"{path}: row {line}: missing value")
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}: row {line}: {cell!r} is not a number "
                                "(decimal point required)") from None
            if not np.isfinite(v):
                raise DataError(f"{path}: row {line}: non-finite value {cell!r}")
            values.append(v)
    if not values:
        raise DataError(f"{path}: no data rows")
    try:
        return Series(np.array(values), label=label, interval=interval)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def data_dir(override=None) -> Optional[Path]:
    value = override or os.environ.get(DATA_DIR_ENV)
    return Path(value) if value else None


def load_entry(entry: DatasetEntry, directory) -> Series:
    return load_csv(Path(directory) / entry.filename, entry.value_column,
                    entry.date_column, entry.abbreviation, entry.frequency)


def prepare(entry: DatasetEntry, raw: Series) -> Series:
    """HP cycle for detrended entries, the raw series otherwise."""
    if raw.n != entry.expected_n:
        warnings.warn(f"{entry.abbreviation}: {raw.n} observations, expected "
                      f"{entry.expected_n}", LengthMismatchWarning, stacklevel=2)
    if not entry.detrend:
        return raw
    _, cycle = hp_filter(raw, entry.hp_lambda)
    return Series(cycle.values, entry.abbreviation, entry.frequency)
