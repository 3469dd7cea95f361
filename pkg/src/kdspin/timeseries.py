"""Sampled observables versus time, plus deterministic CSV/JSON export.

The CSV schema is fixed:

    t,p_m1_up,p_m1_dn,p_p1_up,p_p1_dn,s_total,s_m1,s_p1,norm

Columns the producing run did not record are emitted as empty fields;
undefined conditioned-spin samples are emitted as the literal token
``nan``.  Export is byte-stable for identical inputs: floats are
formatted with repr-shortest precision and the metadata sidecar carries
no timestamps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["TimeSeries", "CSV_COLUMNS", "export", "read_csv"]

CSV_COLUMNS = (
    "t",
    "p_m1_up",
    "p_m1_dn",
    "p_p1_up",
    "p_p1_dn",
    "s_total",
    "s_m1",
    "s_p1",
    "norm",
)


@dataclass
class TimeSeries:
    """Named real-valued series over strictly increasing sample times."""

    times: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.times.shape:
                raise ValueError(
                    f"column {name!r} has length {col.shape}, times {self.times.shape}"
                )
            self.columns[name] = col

    def __len__(self):
        return len(self.times)

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]


def _fmt(x: float) -> str:
    if np.isnan(x):
        return "nan"
    return repr(float(x))


def export(series: TimeSeries, path) -> None:
    """Write ``path`` (CSV) and ``path + '.meta.json'`` (metadata sidecar)."""
    path = str(path)
    try:
        lines = [",".join(CSV_COLUMNS)]
        for i, t in enumerate(series.times):
            row = [_fmt(t)]
            for name in CSV_COLUMNS[1:]:
                if name in series.columns:
                    row.append(_fmt(series.columns[name][i]))
                else:
                    row.append("")
            lines.append(",".join(row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        with open(path + ".meta.json", "w") as fh:
            json.dump(series.metadata, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed to export time series to {path}: {exc}") from exc


def read_csv(path) -> TimeSeries:
    """Round-trip reader for the fixed CSV schema."""
    try:
        with open(str(path)) as fh:
            header = fh.readline().strip().split(",")
            rows = [line.strip().split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise OSError(f"failed to read time series from {path}: {exc}") from exc
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header in {path}: {header}")
    cols: dict[str, list] = {name: [] for name in header}
    present = {name: True for name in header}
    for row in rows:
        for name, val in zip(header, row):
            if val == "":
                present[name] = False
            else:
                cols[name].append(float(val))
    times = np.array(cols["t"])
    columns = {
        name: np.array(cols[name])
        for name in header[1:]
        if present[name] and len(cols[name]) == len(times)
    }
    return TimeSeries(times=times, columns=columns, metadata={})
