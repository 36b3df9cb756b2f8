"""CSV formats and the grid mini-language.

Joint table CSV: first header cell is ``x\\y``, remaining header cells are
the y labels; each data row is an x label followed by the joint cells.
Distribution CSV: two columns ``value,prob``.  Returns CSV: ``outcome``
column followed by one column of yield rates per asset.

All output is UTF-8, comma-separated, ``\\n`` line endings, reals printed
with 10 significant digits, rows in deterministic order.
"""

from __future__ import annotations

import csv
import io
import math
from typing import List, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, GridSpecError
from .prob import Distribution, JointTable, validate_distribution

GRID_TOL = 1e-9


def parse_grid(spec: str) -> np.ndarray:
    """Parse ``min:max:step`` into an inclusive grid.

    The grid starts at min and advances by step; max is included when it
    lies within 1e-9 of a step multiple.
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise GridSpecError(f"grid spec {spec!r} is not min:max:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise GridSpecError(f"grid spec {spec!r} has non-numeric fields")
    if step <= 0 or hi < lo:
        raise GridSpecError(f"grid spec {spec!r} needs max >= min and step > 0")
    n = int(math.floor((hi - lo) / step + GRID_TOL)) + 1
    return lo + step * np.arange(n)


def _label(cell: str):
    """Numeric-looking labels become floats so truth functions can use them."""
    try:
        return float(cell)
    except ValueError:
        return cell


def format_real(v) -> str:
    if v is None:
        return "undefined"
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.10g}"


def read_distribution_csv(path) -> Distribution:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise DimensionMismatch(f"{path}: empty distribution file")
    if rows[0][0].strip().lower() == "value":
        rows = rows[1:]
    support, weights = [], []
    for r in rows:
        if len(r) < 2:
            raise DimensionMismatch(f"{path}: row {r!r} needs value,prob")
        support.append(_label(r[0].strip()))
        weights.append(float(r[1]))
    return validate_distribution(weights, support)


def write_distribution_csv(path, dist: Distribution):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("value,prob\n")
        for label, p in zip(dist.support, dist.probs):
            fh.write(f"{label},{format_real(p)}\n")


def read_joint_csv(path) -> JointTable:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise DimensionMismatch(f"{path}: joint file needs header and rows")
    header = rows[0]
    if header[0].strip() not in ("x\\y", "x\\\\y"):
        raise DimensionMismatch(
            f"{path}: first header cell must be 'x\\y', got {header[0]!r}")
    y_support = [_label(c.strip()) for c in header[1:]]
    x_support, cells = [], []
    for r in rows[1:]:
        if len(r) != len(header):
            raise DimensionMismatch(f"{path}: ragged row {r!r}")
        x_support.append(_label(r[0].strip()))
        cells.append([float(c) for c in r[1:]])
    return JointTable.from_weights(np.array(cells), x_support, y_support)


def write_joint_csv(path, joint: JointTable):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("x\\y," + ",".join(str(l) for l in joint.y_support) + "\n")
        for label, row in zip(joint.x_support, joint.cells):
            fh.write(str(label) + "," +
                     ",".join(format_real(v) for v in row) + "\n")


def read_matrix_csv(path):
    """Matrix with the joint layout but arbitrary nonnegative values
    (relatedness models, distortion matrices, semantic channels)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise DimensionMismatch(f"{path}: matrix file needs header and rows")
    header = rows[0]
    y_support = [_label(c.strip()) for c in header[1:]]
    x_support, values = [], []
    for r in rows[1:]:
        if len(r) != len(header):
            raise DimensionMismatch(f"{path}: ragged row {r!r}")
        x_support.append(_label(r[0].strip()))
        values.append([float(c) for c in r[1:]])
    return x_support, y_support, np.array(values, dtype=float)


def read_returns_csv(path):
    """Outcome labels plus per-asset yield-rate columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise DimensionMismatch(f"{path}: returns file needs header and rows")
    header = rows[0]
    outcomes, rates = [], []
    for r in rows[1:]:
        if len(r) != len(header):
            raise DimensionMismatch(f"{path}: ragged row {r!r}")
        outcomes.append(_label(r[0].strip()))
        rates.append([float(c) for c in r[1:]])
    return outcomes, np.array(rates, dtype=float)


def write_csv(path, header: Sequence[str], rows,
              status: Optional[str] = None):
    """Write rows of reals/labels with a fixed header.

    ``status`` appends a final ``# status=...`` comment row (used to flag
    partial traces after non-convergence).
    """
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                format_real(v) if isinstance(v, (float, np.floating)) or v is None
                else str(v)
                for v in row) + "\n")
        if status:
            fh.write(f"# status={status}\n")
