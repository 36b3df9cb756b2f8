"""Entropy and information measures, Shannon and semantic.

Everything is in bits (log base 2). Positive mass over zero mass yields
``math.inf`` / ``-math.inf`` as the distinguished infinite value; silent
epsilon-padding is never used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    NonPositiveSimilarity,
    ZeroLogicalProbability,
)
from .prob import (
    Distribution,
    JointTable,
    SemanticChannel,
    logical_probability,
    semantic_bayes,
)

LOG2E = math.log2(math.e)


def _xlog2x(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def entropy(p: Distribution) -> float:
    """Shannon entropy -sum p log2 p with the 0 log 0 = 0 convention."""
    return float(-_xlog2x(p.probs).sum())


def cross_entropy(p: Distribution, q: Distribution) -> float:
    """-sum p log2 q; inf when p puts mass where q has none."""
    if tuple(p.support) != tuple(q.support):
        raise DimensionMismatch("cross_entropy over mismatched supports")
    pm = p.probs > 0
    if np.any(pm & (q.probs <= 0)):
        return math.inf
    return float(-np.sum(p.probs[pm] * np.log2(q.probs[pm])))


def kl_divergence(p: Distribution, q: Distribution) -> float:
    """KL(p || q) in bits, >= 0; inf on support violation."""
    if tuple(p.support) != tuple(q.support):
        raise DimensionMismatch("kl_divergence over mismatched supports")
    pm = p.probs > 0
    if np.any(pm & (q.probs <= 0)):
        return math.inf
    return float(np.sum(p.probs[pm] * np.log2(p.probs[pm] / q.probs[pm])))


def shannon_mi(joint: JointTable) -> float:
    """I(X;Y) = sum P(x,y) log2 [P(x,y) / (P(x)P(y))]."""
    px = joint.cells.sum(axis=1)
    py = joint.cells.sum(axis=0)
    c = joint.cells
    nz = c > 0
    denom = np.outer(px, py)
    return float(np.sum(c[nz] * np.log2(c[nz] / denom[nz])))


def semantic_info_point(truth_value: float, logical_prob: float) -> float:
    """Pointwise semantic information log2[T(theta|x) / T(theta)].

    Negative for poorly fitting labels; -inf when the label is plainly
    false (truth value 0).
    """
    if logical_prob <= 0:
        raise ZeroLogicalProbability("logical probability must be positive")
    if truth_value <= 0:
        return -math.inf
    return math.log2(truth_value / logical_prob)


def semantic_kl(posterior: Distribution, truth_col,
                px: Distribution) -> float:
    """Semantic KL information sum_i P(x_i|y_j) log2[T(theta|x_i)/T(theta)].

    The logical probability in the denominator is always taken against the
    prior px, not against the posterior doing the averaging.
    """
    if tuple(posterior.support) != tuple(px.support):
        raise DimensionMismatch("posterior and prior supports differ")
    t = np.asarray(truth_col, dtype=float)
    if len(t) != len(px):
        raise DimensionMismatch("truth column length mismatch")
    t_theta = float(px.probs @ t)
    if t_theta <= 0:
        raise ZeroLogicalProbability("zero logical probability")
    pm = posterior.probs > 0
    if np.any(pm & (t <= 0)):
        return -math.inf
    return float(np.sum(posterior.probs[pm] * np.log2(t[pm] / t_theta)))


@dataclass(frozen=True)
class SemanticInfoReport:
    """Semantic mutual information with its entropy decomposition.

    semi == coverage_entropy - fuzzy_entropy == H(X) - prediction_entropy,
    and semi <= shannon_mi with equality only for the matched channel.
    efficiency is semi/shannon_mi, or None when shannon_mi is 0.
    """

    semi: float
    coverage_entropy: float
    fuzzy_entropy: float
    prediction_entropy: float
    shannon_mi: float
    efficiency: Optional[float]


def semantic_mi(joint: JointTable, channel: SemanticChannel) -> SemanticInfoReport:
    """SeMI of a joint table under a semantic channel, with decomposition."""
    if channel.x_support != tuple(joint.x_support):
        raise DimensionMismatch("channel x support does not match joint")
    if channel.labels != tuple(joint.y_support):
        raise DimensionMismatch("channel labels do not match joint")
    px = joint.px()
    py = joint.cells.sum(axis=0)
    t_theta = logical_probability(channel, px)
    used = py > 0
    if np.any(used & (t_theta <= 0)):
        raise ZeroLogicalProbability("used label with zero logical probability")

    cells = joint.cells
    T = channel.columns
    mass = cells > 0
    if np.any(mass & (T <= 0)):
        semi = -math.inf
        fuzzy = math.inf
    else:
        semi = float(np.sum(cells[mass] * np.log2(
            T[mass] / np.broadcast_to(t_theta, cells.shape)[mass])))
        fuzzy = float(-np.sum(cells[mass] * np.log2(T[mass])))
    coverage = float(-np.sum(py[used] * np.log2(t_theta[used])))

    # prediction entropy -sum P(x,y) log2 P(x|theta_j)
    pred = 0.0
    for j in range(cells.shape[1]):
        if py[j] <= 0:
            continue
        post = semantic_bayes(px, T[:, j]).probs
        col_mass = cells[:, j] > 0
        if np.any(col_mass & (post <= 0)):
            pred = math.inf
            break
        pred -= float(np.sum(cells[col_mass, j] * np.log2(post[col_mass])))

    shmi = shannon_mi(joint)
    eff = None if shmi == 0 else (semi / shmi if math.isfinite(semi) else -math.inf)
    return SemanticInfoReport(semi, coverage, fuzzy, pred, shmi, eff)


def emi_similarity(s_matrix, weighting, mode: str = "per_label") -> float:
    """Estimated mutual information from a positive similarity matrix.

    Distribution form (weighting is a JointTable):
        sum_ij P(x_i,y_j) log2[ S(x_i,y_j) / sum_l P(x_l) S(x_l,y_j) ].

    Sample form (weighting is a sequence of (x_index, y_index) pairs):
        mean_k log2[ S(x_k,y_k) / Z_k ].  The printed partition sum is
        ambiguous, so both readings are available:
        mode='per_label'  Z_k = (1/N) sum_l S(x_l, y_k) over sample instances
                          (consistent with the distribution form; default);
        mode='pooled'     Z   = (1/N) sum_l S(x_l, y_l) over sample pairs.
    """
    S = np.asarray(s_matrix, dtype=float)
    if isinstance(weighting, JointTable):
        if S.shape != weighting.cells.shape:
            raise DimensionMismatch(
                f"similarity shape {S.shape} vs joint {weighting.cells.shape}")
        cells = weighting.cells
        if np.any((cells > 0) & (S <= 0)):
            raise NonPositiveSimilarity("similarity must be positive where weighted")
        px = cells.sum(axis=1)
        part = px @ S                              # per-column partition
        nz = cells > 0
        ratio = S[nz] / np.broadcast_to(part, S.shape)[nz]
        return float(np.sum(cells[nz] * np.log2(ratio)))

    pairs = list(weighting)
    if not pairs:
        raise DimensionMismatch("empty sample")
    xs = np.array([i for i, _ in pairs], dtype=int)
    ys = np.array([j for _, j in pairs], dtype=int)
    vals = S[xs, ys]
    if np.any(vals <= 0):
        raise NonPositiveSimilarity("similarity must be positive on sample pairs")
    n = len(pairs)
    if mode == "per_label":
        parts = S[xs][:, ys].mean(axis=0)   # (1/N) sum_l S(x_l, y_k)
    elif mode == "pooled":
        parts = np.full(n, vals.mean())
    else:
        raise DimensionMismatch(f"unknown EMI mode {mode!r}")
    return float(np.mean(np.log2(vals / parts)))


def dv_lower_bound(p: Distribution, q: Distribution, score) -> float:
    """Donsker-Varadhan lower bound on KL(p || q), in bits.

    The score is in natural units: value = [sum p*score - ln sum q e^score]
    / ln 2.  Tight exactly at score = ln(p/q).
    """
    if tuple(p.support) != tuple(q.support):
        raise DimensionMismatch("dv_lower_bound over mismatched supports")
    if np.any(q.probs <= 0):
        raise DimensionMismatch("q must be strictly positive")
    t = np.asarray(score, dtype=float)
    if len(t) != len(p):
        raise DimensionMismatch("score length mismatch")
    first = float(p.probs @ t)
    second = math.log(float(q.probs @ np.exp(t)))
    return (first - second) / math.log(2.0)
