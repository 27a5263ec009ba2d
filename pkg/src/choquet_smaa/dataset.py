"""Performance tables and the three-step clamped z-score normalization.

Raw evaluations are normalized per elementary criterion: compute the mean
M_t and population standard deviation s_t over the alternatives, take
z-scores, then map 0.5 + z/6 clamped to [0, 1] (so the band M_t +- 3 s_t
spans the unit interval). Criteria with decreasing preference direction use
the mirrored map 0.5 - z/6.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

import numpy as np

from .hierarchy import Hierarchy


@dataclass(frozen=True)
class PerformanceTable:
    """Alternatives x elementary-criteria matrix in native units.

    Columns follow the hierarchy's leaf declaration order; `leaf_labels`
    records the header names in that order.
    """

    alternatives: tuple[str, ...]
    leaf_labels: tuple[str, ...]
    values: np.ndarray  # shape (n_alternatives, n_leaves), float64

    def row(self, alternative: str) -> np.ndarray:
        return self.values[self.alternatives.index(alternative)]


@dataclass(frozen=True)
class ColumnStats:
    mean: np.ndarray
    sd: np.ndarray  # population standard deviation (divisor |A|)


@dataclass(frozen=True)
class NormalizedTable:
    alternatives: tuple[str, ...]
    leaf_labels: tuple[str, ...]
    values: np.ndarray  # shape (n_alternatives, n_leaves), all cells in [0, 1]

    def row(self, alternative: str) -> np.ndarray:
        return self.values[self.alternatives.index(alternative)]


def load_table(source: str | IO[str], h: Hierarchy) -> PerformanceTable:
    """Read a performance CSV against a hierarchy.

    The file is UTF-8, comma-separated, first column ``alternative``, one
    header per elementary criterion named by its leaf label. Column order in
    the file is free; values are returned in hierarchy leaf order.

    Raises
    ------
    ValueError
        On a missing or extra column, a non-numeric cell, or a duplicate
        alternative label.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8", newline="") as f:
            return _parse_table(f, h, source)
    return _parse_table(source, h, getattr(source, "name", "<stream>"))


def _parse_table(stream: IO[str], h: Hierarchy, name: str) -> PerformanceTable:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{name}: empty file") from None
    if not header or header[0] != "alternative":
        raise ValueError(f"{name}: first column must be 'alternative'")
    labels = [h.label_of(t) for t in h.leaves]
    seen = header[1:]
    missing = sorted(set(labels) - set(seen))
    extra = sorted(set(seen) - set(labels))
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing columns {missing}")
        if extra:
            parts.append(f"unknown columns {extra}")
        raise ValueError(f"{name}: " + "; ".join(parts))
    order = [seen.index(lab) + 1 for lab in labels]

    alternatives: list[str] = []
    rows: list[list[float]] = []
    for lineno, record in enumerate(reader, start=2):
        if not record:
            continue
        alt = record[0]
        if alt in alternatives:
            raise ValueError(f"{name}:{lineno}: duplicate alternative {alt!r}")
        if len(record) != len(header):
            raise ValueError(f"{name}:{lineno}: expected {len(header)} cells, got {len(record)}")
        row = []
        for j in order:
            try:
                row.append(float(record[j]))
            except ValueError:
                raise ValueError(
                    f"{name}:{lineno}: non-numeric value {record[j]!r} in column {header[j]!r}"
                ) from None
        alternatives.append(alt)
        rows.append(row)
    if not rows:
        raise ValueError(f"{name}: no data rows")
    return PerformanceTable(
        alternatives=tuple(alternatives),
        leaf_labels=tuple(labels),
        values=np.array(rows, dtype=np.float64),
    )


def column_stats(t: PerformanceTable) -> ColumnStats:
    """Per-column mean and population standard deviation."""
    return ColumnStats(mean=t.values.mean(axis=0), sd=t.values.std(axis=0))


def normalize(t: PerformanceTable, stats: ColumnStats, h: Hierarchy) -> NormalizedTable:
    """Apply the clamped z-score map per column.

    Raises
    ------
    ValueError
        If a column is constant (zero standard deviation); such data cannot
        be z-scored and usually signals a broken input file.
    """
    degenerate = [lab for lab, s in zip(t.leaf_labels, stats.sd) if s == 0.0]
    if degenerate:
        raise ValueError(f"degenerate column(s) with zero standard deviation: {degenerate}")
    z = (t.values - stats.mean) / stats.sd
    increasing = np.array([h.direction(t_id) == "max" for t_id in h.leaves])
    signed = np.where(increasing, z, -z)
    values = np.clip(0.5 + signed / 6.0, 0.0, 1.0)
    return NormalizedTable(
        alternatives=t.alternatives, leaf_labels=t.leaf_labels, values=values
    )
