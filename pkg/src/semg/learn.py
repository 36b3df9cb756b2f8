"""Learning truth and similarity functions from data.

Parametric fits use exhaustive grid search plus one golden-section pass
per parameter; no gradients anywhere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import (
    AllZeroRow,
    DegeneratePosterior,
    DimensionMismatch,
    EmptyGrid,
    NonSquare,
)
from .prob import Distribution, JointTable, TruthParam, relatedness

SIGMA_FLOOR = 1e-6
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def semantic_kl_objective(posterior: np.ndarray, prior: np.ndarray,
                          truth_col: np.ndarray) -> float:
    """sum_i P(x_i|y_j) log2 [T(theta|x_i) / T(theta)], -inf if unsupported."""
    t_theta = float(prior @ truth_col)
    if t_theta <= 0:
        return -math.inf
    nz = posterior > 0
    if np.any(nz & (truth_col <= 0)):
        return -math.inf
    return float(np.sum(posterior[nz] * np.log2(truth_col[nz] / t_theta)))


def _golden_max(f, lo: float, hi: float, iters: int = 60) -> float:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2.0


@dataclass(frozen=True)
class TruthFit:
    param: TruthParam
    objective: float            # achieved semantic KL information, bits
    degenerate: bool = False    # posterior carried no usable signal


def fit_truth_semantic_kl(posterior: Distribution, px: Distribution,
                          family: str,
                          search: Optional[dict] = None) -> TruthFit:
    """Fit a truth function by maximizing semantic KL information.

    family 'tabular' has a closed-form maximizer (the posterior/prior ratio
    renormalized to peak at 1); 'gaussian' and 'logistic' run a grid search
    refined by one golden-section pass per parameter.  Grid ties break
    toward smaller sigma (gaussian) or larger |k| (logistic).
    """
    if tuple(posterior.support) != tuple(px.support):
        raise DimensionMismatch("posterior and prior supports differ")
    post = posterior.probs
    prior = px.probs

    if family == "tabular":
        if np.any((prior <= 0) & (post > 0)):
            raise DegeneratePosterior("posterior mass where the prior is zero")
        ratio = np.zeros(len(post))
        nz = prior > 0
        ratio[nz] = post[nz] / prior[nz]
        if ratio.max() <= 0:
            raise DegeneratePosterior("posterior carries no mass")
        col = ratio / ratio.max()
        obj = semantic_kl_objective(post, prior, col)
        return TruthFit(TruthParam.tabular(col), obj,
                        degenerate=bool(np.allclose(post, prior)))

    if family not in ("gaussian", "logistic"):
        raise DimensionMismatch(f"unknown family {family!r}")
    x = posterior.numeric_support()
    span = float(x.max() - x.min())
    if span <= 0:
        raise DegeneratePosterior("single-point support")
    search = search or {}

    def default_grid(lo, hi, n=64):
        return np.linspace(lo, hi, n)

    if family == "gaussian":
        mu_grid = np.asarray(search.get("mu", default_grid(x.min(), x.max())))
        sigma_grid = np.asarray(search.get(
            "sigma", default_grid(max(span / 64, SIGMA_FLOOR), span)))
        if mu_grid.size == 0 or sigma_grid.size == 0:
            raise EmptyGrid("empty parameter grid")

        def col(mu, sigma):
            return np.exp(-((x - mu) ** 2) / (2.0 * sigma * sigma))

        best = (-math.inf, None, None)
        for mu in mu_grid:
            for sigma in sigma_grid:
                obj = semantic_kl_objective(post, prior, col(mu, sigma))
                # strict > keeps the earlier (smaller sigma) member on ties
                key = (obj, -sigma)
                if best[1] is None or key > (best[0], -best[2]):
                    best = (obj, float(mu), float(sigma))
        _, mu0, sig0 = best
        mu_step = float(mu_grid[1] - mu_grid[0]) if len(mu_grid) > 1 else span / 8
        sg_lo = max(SIGMA_FLOOR, sig0 / 2)
        sg_hi = sig0 * 2
        mu1 = _golden_max(lambda m: semantic_kl_objective(post, prior, col(m, sig0)),
                          mu0 - mu_step, mu0 + mu_step)
        sig1 = _golden_max(lambda sg: semantic_kl_objective(post, prior, col(mu1, sg)),
                           sg_lo, sg_hi)
        obj = semantic_kl_objective(post, prior, col(mu1, sig1))
        if obj < best[0]:
            mu1, sig1, obj = mu0, sig0, best[0]
        degenerate = obj <= 1e-12
        return TruthFit(TruthParam.gaussian(mu1, max(sig1, SIGMA_FLOOR)), obj,
                        degenerate=degenerate)

    step = float(np.min(np.diff(np.sort(x)))) if len(x) > 1 else span
    k_hi = 16.0 / max(step, span / 1e6)    # sharper than the grid resolves
    x0_grid = np.asarray(search.get("x0", default_grid(x.min(), x.max())))
    k_grid = np.asarray(search.get(
        "k", np.concatenate([-np.geomspace(k_hi, 0.5 / span, 32),
                             np.geomspace(0.5 / span, k_hi, 32)])))
    if x0_grid.size == 0 or k_grid.size == 0:
        raise EmptyGrid("empty parameter grid")

    def lcol(x0, k):
        z = np.clip(-k * (x - x0), -700.0, 700.0)
        return 1.0 / (1.0 + np.exp(z))

    best = (-math.inf, None, None)
    for x0 in x0_grid:
        for k in k_grid:
            obj = semantic_kl_objective(post, prior, lcol(x0, k))
            if best[1] is None or (obj, abs(k)) > (best[0], abs(best[2])):
                best = (obj, float(x0), float(k))
    _, x00, k0 = best
    x0_step = float(x0_grid[1] - x0_grid[0]) if len(x0_grid) > 1 else span / 8
    x01 = _golden_max(lambda v: semantic_kl_objective(post, prior, lcol(v, k0)),
                      x00 - x0_step, x00 + x0_step)
    k1 = _golden_max(lambda v: semantic_kl_objective(post, prior, lcol(x01, v)),
                     k0 / 2 if k0 > 0 else k0 * 2,
                     k0 * 2 if k0 > 0 else k0 / 2)
    obj = semantic_kl_objective(post, prior, lcol(x01, k1))
    if obj < best[0]:
        x01, k1, obj = x00, k0, best[0]
    return TruthFit(TruthParam.logistic(x01, k1), obj,
                    degenerate=obj <= 1e-12)


@dataclass(frozen=True)
class GaussianRowFit:
    param: TruthParam
    sigma_floored: bool
    non_gaussian: bool          # |excess kurtosis| > 1 under the row weights
    excess_kurtosis: float


def gaussian_truth_from_transition(transition_row, grid,
                                   px: Optional[Distribution] = None
                                   ) -> GaussianRowFit:
    """Gaussian truth function from a transition row P(y_j|x).

    The row (times the prior, uniform by default) is normalized to a
    distribution over the numeric grid; its mean and standard deviation
    become (mu, sigma).  Exact when the row is Gaussian-proportional on a
    wide grid; otherwise the fit is moment-matched and flagged when the
    shape is visibly non-Gaussian.
    """
    x = np.asarray(grid, dtype=float)
    row = np.asarray(transition_row, dtype=float)
    if row.shape != x.shape:
        raise DimensionMismatch("row and grid lengths differ")
    if np.any(row < 0):
        raise AllZeroRow("transition row has negative entries")
    weights = row if px is None else row * px.probs
    total = weights.sum()
    if total <= 0:
        raise AllZeroRow("transition row carries no mass")
    w = weights / total
    mu = float(w @ x)
    var = float(w @ (x - mu) ** 2)
    sigma = math.sqrt(var)
    floored = sigma < SIGMA_FLOOR
    if floored:
        sigma = SIGMA_FLOOR
        kurt_excess = 0.0
    else:
        m4 = float(w @ (x - mu) ** 4)
        kurt_excess = m4 / (var * var) - 3.0
    return GaussianRowFit(TruthParam.gaussian(mu, sigma), floored,
                          abs(kurt_excess) > 1.0, kurt_excess)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric word similarity S(x,y) in [0,1] over a shared vocabulary."""

    support: tuple
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


def word_similarity(joint: JointTable) -> SimilarityMatrix:
    """S(x,y) = 0 where P(x,y) = 0, else m(x,y) / max m over all cells."""
    if len(joint.x_support) != len(joint.y_support) or \
            tuple(joint.x_support) != tuple(joint.y_support):
        raise NonSquare("co-occurrence table must be square over one vocabulary")
    rel = relatedness(joint)
    if rel.x_support != tuple(joint.x_support):
        raise NonSquare("zero-marginal words; similarity undefined for them")
    m = rel.values
    s = np.where(joint.cells > 0, m / m.max(), 0.0)
    return SimilarityMatrix(tuple(joint.x_support), s)
