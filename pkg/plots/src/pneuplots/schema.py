"""Readers for the benchmark's CSV exchange formats.

Two file kinds exist: per-run traces (one row per control instant) and the
metrics summary the `compare` tool writes (one row per controller and
scenario).  Readers validate headers strictly and report the offending
column by name, since silent column drift is the classic way benchmark
figures go wrong.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TRACE_COLUMNS = ("t", "p_out_kPa_rel", "p_ref_kPa_rel", "e_kPa", "mode",
                 "u_applied", "u_I", "u_D", "omega_rel", "solve_ms")

METRIC_COLUMNS = ("aae_kPa", "max_abs_e_kPa", "switches",
                  "pwm_energy_pct_s", "act_ms")
SUMMARY_HEADER = ("label", "scenario") + METRIC_COLUMNS


class SchemaError(ValueError):
    pass


@dataclass
class Trace:
    label: str
    columns: dict  # name -> 1-D float array

    def __getitem__(self, name):
        return self.columns[name]

    def __len__(self):
        return len(self.columns["t"])

    @property
    def span(self):
        t = self.columns["t"]
        return float(t[0]), float(t[-1])


def _check_header(header, expected, path):
    missing = [c for c in expected if c not in header]
    extra = [c for c in header if c not in expected]
    if missing or extra:
        bad = (missing + extra)[0]
        raise SchemaError(
            f"{path}: unexpected trace schema at column {bad!r} "
            f"(missing: {missing or '-'}, extra: {extra or '-'})")
    if tuple(header) != tuple(expected):
        raise SchemaError(f"{path}: columns out of order, expected {expected}")


def read_trace(path, label=None) -> Trace:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        _check_header(header, TRACE_COLUMNS, path)
        try:
            rows = [[float(v) for v in row] for row in reader if row]
        except ValueError as exc:
            raise SchemaError(f"{path}: non-numeric cell ({exc})") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    cols = np.asarray(rows, dtype=float).T
    return Trace(label or path.stem, dict(zip(TRACE_COLUMNS, cols)))


def read_metrics(path):
    """Summary CSV -> {(label, scenario): {metric: value}}."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        _check_header(reader.fieldnames, SUMMARY_HEADER, path)
        table = {}
        for row in reader:
            key = (row["label"], row["scenario"])
            try:
                table[key] = {m: float(row[m]) for m in METRIC_COLUMNS}
            except (TypeError, ValueError) as exc:
                raise SchemaError(
                    f"{path}: bad metric value for {key}: {exc}") from exc
    if not table:
        raise SchemaError(f"{path}: no metric rows")
    return table
