"""Tabular results and CSV emission.

Numbers are rendered with a configurable count of significant digits;
cells with no applicable value carry the marker "--" (for example the
tolerable-background column where no violation exists). Non-finite
numbers are never written out; they render as the marker too.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

NO_VALUE = "--"
DEFAULT_PRECISION = 6


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(str(c) for c in self.columns)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row of width {len(row)} against {len(self.columns)} columns"
                )

    def append(self, row) -> None:
        row = tuple(row)
        if len(row) != len(self.columns):
            raise ValueError(
                f"row of width {len(row)} against {len(self.columns)} columns"
            )
        self.rows.append(row)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def format_cell(value, precision: int = DEFAULT_PRECISION) -> str:
    """Render one cell: strings pass through, integers stay integral,
    floats get `precision` significant digits, non-finite becomes "--"."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if not math.isfinite(v):
        return NO_VALUE
    return f"{v:.{precision}g}"


def write_csv(table: ResultTable, path, precision: int = DEFAULT_PRECISION) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_cell(v, precision) for v in row])


def to_plot_data(table: ResultTable, key_columns: tuple[str, ...]) -> ResultTable:
    """Reshape to long format: one (keys..., quantity, value) row per
    non-key cell, in row-major order. String markers are kept so gaps in
    the sweep remain visible to plotting tools."""
    for key in key_columns:
        if key not in table.columns:
            raise ValueError(f"key column {key!r} not in table")
    key_idx = [table.columns.index(k) for k in key_columns]
    value_cols = [
        (i, name) for i, name in enumerate(table.columns) if name not in key_columns
    ]
    out = ResultTable(columns=tuple(key_columns) + ("quantity", "value"))
    for row in table.rows:
        keys = tuple(row[i] for i in key_idx)
        for i, name in value_cols:
            out.append(keys + (name, row[i]))
    return out


def plot_data_path(out_path: str) -> str:
    """Companion long-format CSV path: results.csv -> results-plotdata.csv."""
    stem, dot, ext = out_path.rpartition(".")
    if not dot:
        return out_path + "-plotdata"
    return f"{stem}-plotdata.{ext}"
