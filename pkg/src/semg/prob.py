"""Core probability types under the P-T framework.

Two kinds of normalization coexist here and must not be confused:

* statistical probabilities P are *horizontally* normalized (rows/vectors
  sum to 1);
* truth columns T are *longitudinally* normalized (the maximum over the
  support is 1, the sum is usually > or < 1).

All types are immutable values; every operation is a pure function.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    AllZeroChannel,
    DegenerateMarginal,
    DimensionMismatch,
    EmptySupport,
    NegativeMass,
    NonPositiveSigma,
    SumOutOfTolerance,
    ZeroLogicalProbability,
    ZeroPrior,
)

Label = Union[str, float, int]

INGEST_TOL = 1e-6     # accepted |sum - 1| before renormalizing
SUM_TOL = 1e-9        # post-construction identity tolerance


def _as_probs(values) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.ndim != 1:
        raise DimensionMismatch(f"expected 1-D weights, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Distribution:
    """Finite probability vector over an ordered, labelled support."""

    support: tuple
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "probs", np.asarray(self.probs, dtype=float))
        if len(self.support) == 0:
            raise EmptySupport("distribution over empty support")
        if len(self.support) != len(self.probs):
            raise DimensionMismatch(
                f"{len(self.support)} labels vs {len(self.probs)} probabilities")
        if len(set(self.support)) != len(self.support):
            raise DimensionMismatch("support labels must be unique")
        if np.any(self.probs < 0):
            raise NegativeMass("negative probability mass")
        if abs(self.probs.sum() - 1.0) > SUM_TOL:
            raise SumOutOfTolerance(
                f"probabilities sum to {self.probs.sum():.12g}, not 1")
        self.probs.setflags(write=False)

    def __len__(self):
        return len(self.support)

    def numeric_support(self) -> np.ndarray:
        """Support as a float vector; fails for non-numeric labels."""
        try:
            return np.array([float(v) for v in self.support])
        except (TypeError, ValueError):
            raise DimensionMismatch("support labels are not numeric")

    def index_of(self, label) -> int:
        try:
            return self.support.index(label)
        except ValueError:
            raise DimensionMismatch(f"label {label!r} not in support")


def validate_distribution(weights, support: Sequence[Label]) -> Distribution:
    """Ingest raw weights: reject bad mass, renormalize within 1e-6 of 1."""
    support = tuple(support)
    if len(support) == 0:
        raise EmptySupport("empty support")
    w = _as_probs(weights)
    if len(w) != len(support):
        raise DimensionMismatch(f"{len(w)} weights vs {len(support)} labels")
    if not np.all(np.isfinite(w)):
        raise NegativeMass("non-finite weight")
    if np.any(w < 0):
        raise NegativeMass(f"negative weight {w.min():.6g}")
    total = w.sum()
    if abs(total - 1.0) > INGEST_TOL:
        raise SumOutOfTolerance(
            f"weights sum to {total:.12g}, outside 1 +/- {INGEST_TOL}")
    return Distribution(support, w / total)


def uniform(support: Sequence[Label]) -> Distribution:
    support = tuple(support)
    if not support:
        raise EmptySupport("empty support")
    return Distribution(support, np.full(len(support), 1.0 / len(support)))


@dataclass(frozen=True)
class JointTable:
    """Matrix P(x_i, y_j) with on-demand marginals and Shannon channel."""

    x_support: tuple
    y_support: tuple
    cells: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_support", tuple(self.x_support))
        object.__setattr__(self, "y_support", tuple(self.y_support))
        c = np.asarray(self.cells, dtype=float)
        object.__setattr__(self, "cells", c)
        if c.shape != (len(self.x_support), len(self.y_support)):
            raise DimensionMismatch(
                f"cells shape {c.shape} vs supports "
                f"({len(self.x_support)}, {len(self.y_support)})")
        if np.any(c < 0):
            raise NegativeMass("negative joint mass")
        if abs(c.sum() - 1.0) > SUM_TOL:
            raise SumOutOfTolerance(f"joint cells sum to {c.sum():.12g}")
        c.setflags(write=False)

    @classmethod
    def from_weights(cls, weights, x_support, y_support) -> "JointTable":
        w = np.asarray(weights, dtype=float)
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise NegativeMass("joint weights must be finite and nonnegative")
        total = w.sum()
        if abs(total - 1.0) > INGEST_TOL:
            raise SumOutOfTolerance(
                f"joint weights sum to {total:.12g}, outside 1 +/- {INGEST_TOL}")
        return cls(tuple(x_support), tuple(y_support), w / total)

    def px(self) -> Distribution:
        return Distribution(self.x_support, self.cells.sum(axis=1))

    def py(self) -> Distribution:
        return Distribution(self.y_support, self.cells.sum(axis=0))

    def shannon_channel(self) -> np.ndarray:
        """Rows P(y_j | x_i); rows with zero marginal are left as zeros."""
        px = self.cells.sum(axis=1)
        out = np.zeros_like(self.cells)
        nz = px > 0
        out[nz] = self.cells[nz] / px[nz, None]
        return out


@dataclass(frozen=True)
class RelatednessMatrix:
    """m(x, y) = P(x,y) / (P(x)P(y)) plus its per-column maxima."""

    x_support: tuple
    y_support: tuple
    values: np.ndarray
    mm: np.ndarray          # column maxima, mm_j = max_x m(x, y_j)

    def __post_init__(self):
        self.values.setflags(write=False)
        self.mm.setflags(write=False)


def relatedness(joint: JointTable) -> RelatednessMatrix:
    """Build m(x,y) from a joint table, dropping zero-marginal rows/columns.

    Reconstruction identities hold on the kept block:
    P(x|y_j) = P(x) m(x, y_j) and P(y|x_i) = m(x_i, y) P(y).
    """
    px = joint.cells.sum(axis=1)
    py = joint.cells.sum(axis=0)
    keep_x = px > 0
    keep_y = py > 0
    if not np.all(keep_x):
        dropped = [joint.x_support[i] for i in np.nonzero(~keep_x)[0]]
        warnings.warn(f"dropping zero-marginal x rows {dropped}", stacklevel=2)
    if not np.all(keep_y):
        dropped = [joint.y_support[j] for j in np.nonzero(~keep_y)[0]]
        warnings.warn(f"dropping zero-marginal y columns {dropped}", stacklevel=2)
    cells = joint.cells[np.ix_(keep_x, keep_y)]
    px = px[keep_x]
    py = py[keep_y]
    if cells.size == 0:
        raise DegenerateMarginal("all rows or columns have zero marginal")
    if np.any(px <= 0) or np.any(py <= 0):
        raise DegenerateMarginal("kept marginal is zero")
    m = cells / np.outer(px, py)
    xs = tuple(l for l, k in zip(joint.x_support, keep_x) if k)
    ys = tuple(l for l, k in zip(joint.y_support, keep_y) if k)
    return RelatednessMatrix(xs, ys, m, m.max(axis=0))


@dataclass(frozen=True)
class TruthParam:
    """Parametric truth-function family.

    family is one of 'gaussian' (mu, sigma), 'logistic' (x0, k) or
    'tabular' (explicit column of values in [0, 1]).
    """

    family: str
    mu: Optional[float] = None
    sigma: Optional[float] = None
    x0: Optional[float] = None
    k: Optional[float] = None
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.family == "gaussian":
            if self.sigma is None or self.sigma <= 0:
                raise NonPositiveSigma(f"sigma={self.sigma}")
            if self.mu is None:
                raise DimensionMismatch("gaussian truth needs mu")
        elif self.family == "logistic":
            if self.x0 is None or self.k is None or not np.isfinite(self.k):
                raise DimensionMismatch("logistic truth needs finite (x0, k)")
        elif self.family == "tabular":
            v = np.asarray(self.values, dtype=float)
            if v.ndim != 1 or len(v) == 0:
                raise DimensionMismatch("tabular truth needs a 1-D column")
            if np.any(v < 0) or np.any(v > 1):
                raise DimensionMismatch("tabular truth values outside [0, 1]")
            object.__setattr__(self, "values", v)
            v.setflags(write=False)
        else:
            raise DimensionMismatch(f"unknown truth family {self.family!r}")

    @classmethod
    def gaussian(cls, mu: float, sigma: float) -> "TruthParam":
        return cls("gaussian", mu=float(mu), sigma=float(sigma))

    @classmethod
    def logistic(cls, x0: float, k: float) -> "TruthParam":
        return cls("logistic", x0=float(x0), k=float(k))

    @classmethod
    def tabular(cls, values) -> "TruthParam":
        return cls("tabular", values=np.asarray(values, dtype=float))


def eval_truth_param(param: TruthParam, grid) -> np.ndarray:
    """Evaluate a truth function on a numeric grid; result is in [0, 1]."""
    x = np.asarray(grid, dtype=float)
    if x.size == 0:
        raise EmptySupport("empty evaluation grid")
    if param.family == "gaussian":
        return np.exp(-((x - param.mu) ** 2) / (2.0 * param.sigma ** 2))
    if param.family == "logistic":
        # clip the exponent so extreme grids saturate to exactly 0/1
        z = np.clip(-param.k * (x - param.x0), -700.0, 700.0)
        return 1.0 / (1.0 + np.exp(z))
    if len(param.values) != len(x):
        raise DimensionMismatch(
            f"tabular column of length {len(param.values)} on grid of {len(x)}")
    return param.values.copy()


@dataclass(frozen=True)
class SemanticChannel:
    """One truth column T(theta_j | x) per label, aligned to an x support."""

    x_support: tuple
    labels: tuple
    columns: np.ndarray                      # shape (n_x, n_labels)
    params: Optional[tuple] = None           # TruthParam provenance per column

    def __post_init__(self):
        object.__setattr__(self, "x_support", tuple(self.x_support))
        object.__setattr__(self, "labels", tuple(self.labels))
        c = np.asarray(self.columns, dtype=float)
        object.__setattr__(self, "columns", c)
        if c.shape != (len(self.x_support), len(self.labels)):
            raise DimensionMismatch(
                f"columns shape {c.shape} vs ({len(self.x_support)}, {len(self.labels)})")
        if np.any(c < -1e-12) or np.any(c > 1 + 1e-12):
            raise DimensionMismatch("truth values outside [0, 1]")
        c.setflags(write=False)

    def column(self, j: int) -> np.ndarray:
        return self.columns[:, j]

    @classmethod
    def from_params(cls, params: Sequence[TruthParam], grid,
                    labels=None) -> "SemanticChannel":
        x = np.asarray(grid, dtype=float)
        cols = np.column_stack([eval_truth_param(p, x) for p in params])
        if labels is None:
            labels = tuple(f"y{j + 1}" for j in range(len(params)))
        return cls(tuple(x.tolist()), tuple(labels), cols, tuple(params))


def truth_from_joint(joint: JointTable) -> SemanticChannel:
    """Matched semantic channel: T(theta_j|x) = m(x,y_j)/mm_j.

    Equivalent to dividing each column of P(y_j|x) by its maximum, so
    every kept column peaks at exactly 1.
    """
    rel = relatedness(joint)
    cols = rel.values / rel.mm[None, :]
    return SemanticChannel(rel.x_support, rel.y_support, cols)


def logical_probability(channel: SemanticChannel, px: Distribution) -> np.ndarray:
    """T(theta_j) = sum_i P(x_i) T(theta_j|x_i), one value per label."""
    if tuple(px.support) != channel.x_support:
        raise DimensionMismatch("channel x support does not match prior")
    return px.probs @ channel.columns


def semantic_bayes(px: Distribution, truth_col) -> Distribution:
    """P(x|theta) = P(x) T(theta|x) / T(theta); works for any prior."""
    t = np.asarray(truth_col, dtype=float)
    if len(t) != len(px):
        raise DimensionMismatch(f"column length {len(t)} vs support {len(px)}")
    weighted = px.probs * t
    z = weighted.sum()
    if z <= 0:
        raise ZeroLogicalProbability("prior-weighted truth mass is zero")
    return Distribution(px.support, weighted / z)


def truth_from_likelihood(px: Distribution, likelihood: Distribution):
    """Recover the truth column whose semantic-Bayes prediction is `likelihood`.

    Returns (column, T(theta)) with T(theta) = 1 / max[P(x|theta)/P(x)].
    Round-trips exactly: semantic_bayes(px, column) == likelihood.
    """
    if tuple(px.support) != tuple(likelihood.support):
        raise DimensionMismatch("prior and likelihood supports differ")
    if np.any((px.probs <= 0) & (likelihood.probs > 0)):
        raise ZeroPrior("likelihood puts mass where the prior is zero")
    ratio = np.zeros(len(px))
    nz = px.probs > 0
    ratio[nz] = likelihood.probs[nz] / px.probs[nz]
    rmax = ratio.max()
    if rmax <= 0:
        raise ZeroLogicalProbability("likelihood carries no mass")
    t_theta = 1.0 / rmax
    return ratio / rmax, t_theta


@dataclass(frozen=True)
class MinMIMatch:
    """MinMI-matching result; transition rows are *not* sum-normalized."""

    py: Distribution
    rows: np.ndarray          # P(y_j | x_i), shape (n_x, n_labels)
    row_defects: np.ndarray   # per-row sum minus 1


def minmi_match_from_semantic(channel: SemanticChannel,
                              px: Distribution) -> MinMIMatch:
    """P(y_j) = T(theta_j)/sum_k T(theta_k); rows T(theta_j|x)/sum_k T(theta_k).

    The transition rows follow the printed matching rule verbatim, so their
    sums generally differ from 1; the defect is reported, never repaired.
    """
    t_theta = logical_probability(channel, px)
    total = t_theta.sum()
    if total <= 0:
        raise AllZeroChannel("all logical probabilities are zero")
    py = Distribution(channel.labels, t_theta / total)
    rows = channel.columns / total
    defects = rows.sum(axis=1) - 1.0
    return MinMIMatch(py, rows, defects)
