"""Purposive-information rewards and log-optimal portfolio machinery.

The control side measures how well an achievable action result serves a
fuzzy goal; the portfolio side generalizes the Kelly formula through the
value-added entropy (expected doubling rate).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateBoost,
    DimensionMismatch,
    RuinReturn,
    ZeroLogicalProbability,
)
from .prob import Distribution, TruthParam, eval_truth_param

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
RATIO_TOL = 1e-10


def purposive_info(result: Distribution, goal_col, px: Distribution) -> float:
    """Reward sum_i P(x_i|a) log2 [T(theta|x_i) / T(theta)] in bits.

    Negative whenever the action parks mass where the goal is mostly false.
    """
    if tuple(result.support) != tuple(px.support):
        raise DimensionMismatch("result and prior supports differ")
    t = np.asarray(goal_col, dtype=float)
    if len(t) != len(px):
        raise DimensionMismatch("goal column length mismatch")
    t_theta = float(px.probs @ t)
    if t_theta <= 0:
        raise ZeroLogicalProbability("goal has zero logical probability")
    nz = result.probs > 0
    if np.any(nz & (t <= 0)):
        return -math.inf
    return float(np.sum(result.probs[nz] * np.log2(t[nz] / t_theta)))


def boosted_target(px: Distribution, goal_col, s: float) -> Distribution:
    """s-boosted semantic-Bayes target P(x)T(theta|x)^s / normalizer."""
    t = np.asarray(goal_col, dtype=float)
    if len(t) != len(px):
        raise DimensionMismatch("goal column length mismatch")
    if s < 0:
        raise DimensionMismatch("boost exponent must be >= 0")
    with np.errstate(divide="ignore"):
        weighted = px.probs * np.where(t > 0, t ** s, 0.0 if s > 0 else 1.0)
    z = weighted.sum()
    if z <= 0:
        raise DegenerateBoost("boost wiped out all probability mass")
    return Distribution(px.support, weighted / z)


@dataclass(frozen=True)
class ControlProblem:
    """Prior over a numeric grid plus a goal truth function."""

    prior: Distribution
    goal: TruthParam

    def goal_column(self) -> np.ndarray:
        return eval_truth_param(self.goal, self.prior.numeric_support())


@dataclass(frozen=True)
class TradeoffRow:
    s: float
    G_bits: float
    R_bits: float
    efficiency: Optional[float]   # None when R is 0 (undefined, not NaN)


def control_tradeoff(problem: ControlProblem,
                     s_grid: Sequence[float]) -> List[TradeoffRow]:
    """Reward/cost table over boost levels.

    For each s the ideal target is the boosted semantic-Bayes prediction;
    the realizable action result is the moment-matched normal on the same
    grid.  G is the purposive information of the result, R its KL
    divergence from the prior (the single-action Shannon cost).
    """
    px = problem.prior
    x = px.numeric_support()
    goal = problem.goal_column()
    rows = []
    for s in s_grid:
        if s < 0:
            raise DimensionMismatch("boost grid must be nonnegative")
        target = boosted_target(px, goal, s)
        mu = float(target.probs @ x)
        sigma = math.sqrt(float(target.probs @ (x - mu) ** 2))
        if sigma <= 0:
            result = target
        else:
            shape = np.exp(-((x - mu) ** 2) / (2.0 * sigma * sigma))
            result = Distribution(px.support, shape / shape.sum())
        G = purposive_info(result, goal, px)
        nz = result.probs > 0
        R = float(np.sum(result.probs[nz] *
                         np.log2(result.probs[nz] / px.probs[nz])))
        if R < 0 and R > -1e-12:
            R = 0.0
        eff = None if R <= 0 else G / R
        rows.append(TradeoffRow(float(s), G, R, eff))
    return rows


@dataclass(frozen=True)
class PortfolioSpec:
    """Per-outcome yield rates for each risky asset, plus a risk-free rate.

    rates[i, k] is the yield of asset k when outcome i happens; the gross
    return of a ratio vector q is R_i(q) = R0 + sum_k q_k (rates[i,k] - r0)
    with R0 = 1 + r0 and the remainder (1 - sum q_k) held at the risk-free
    rate.
    """

    rates: np.ndarray
    risk_free: float = 0.0

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.rates, dtype=float))
        object.__setattr__(self, "rates", r)
        if not np.all(np.isfinite(r)):
            raise DimensionMismatch("yield rates must be finite")
        r.setflags(write=False)

    @property
    def n_outcomes(self) -> int:
        return self.rates.shape[0]

    @property
    def n_assets(self) -> int:
        return self.rates.shape[1]

    def gross_returns(self, q) -> np.ndarray:
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if len(q) != self.n_assets:
            raise DimensionMismatch(f"{len(q)} ratios vs {self.n_assets} assets")
        r0 = self.risk_free
        return (1.0 + r0) + (self.rates - r0) @ q


def value_added_entropy(pred: Distribution, spec: PortfolioSpec, q) -> float:
    """Expected doubling rate sum_i P(x_i) log2 R_i(q), in bits."""
    if len(pred) != spec.n_outcomes:
        raise DimensionMismatch("distribution does not match outcome count")
    returns = spec.gross_returns(q)
    live = pred.probs > 0
    if np.any(live & (returns <= 0)):
        raise RuinReturn("portfolio is ruined on a positive-probability outcome")
    return float(np.sum(pred.probs[live] * np.log2(returns[live])))


def kelly_two_outcome(p1: float, p2: float, r1: float, r2: float,
                      r0: float = 0.0) -> float:
    """Closed-form optimal single-asset ratio for two outcomes.

    With r0 = 0 this is q* = E / |r1 r2|; for r1 = -1 it reduces to the
    Kelly formula q* = P2 - P1/r2.  The excess-rate version handles r0 > 0.
    """
    if r0 == 0.0:
        expected = p1 * r1 + p2 * r2
        return expected / abs(r1 * r2)
    e0 = p1 * r1 + p2 * r2 - r0
    r10 = r1 - r0
    r20 = r2 - r0
    return e0 * (1.0 + r0) / abs(r10 * r20)


@dataclass(frozen=True)
class OptimalRatios:
    q: np.ndarray
    value_bits: float
    capped: bool              # optimum hit the leverage cap

    def __post_init__(self):
        self.q.setflags(write=False)


def _golden_max(f, lo: float, hi: float, tol: float = RATIO_TOL) -> float:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def optimize_ratios(dist: Distribution, spec: PortfolioSpec,
                    cap: float = 1.0) -> OptimalRatios:
    """Maximize the value-added entropy over long-only ratios, sum q <= cap.

    Single asset: golden-section search.  Several assets: coordinate
    ascent with golden-section line searches under the simplex cap, which
    is exact here because the objective is strictly concave on its domain.
    A portfolio with no losing outcome has unbounded log growth; the cap
    is then binding and the result is flagged.
    """
    if len(dist) != spec.n_outcomes:
        raise DimensionMismatch("distribution does not match outcome count")

    def safe_value(q):
        try:
            return value_added_entropy(dist, spec, q)
        except RuinReturn:
            return -math.inf

    if spec.n_assets == 1:
        q_best = _golden_max(lambda q: safe_value([q]), 0.0, cap)
        for cand in (0.0, cap):
            if safe_value([cand]) > safe_value([q_best]):
                q_best = cand
        q = np.array([q_best])
    else:
        q = np.zeros(spec.n_assets)
        for _ in range(200):
            moved = 0.0
            for k in range(spec.n_assets):
                others = q.sum() - q[k]
                hi = max(cap - others, 0.0)

                def line(v, k=k):
                    trial = q.copy()
                    trial[k] = v
                    return safe_value(trial)

                best = _golden_max(line, 0.0, hi)
                for cand in (0.0, hi):
                    if line(cand) > line(best):
                        best = cand
                moved = max(moved, abs(best - q[k]))
                q[k] = best
            if moved < RATIO_TOL:
                break

    value = value_added_entropy(dist, spec, q)
    live = dist.probs > 0
    if np.all(spec.rates[live].min(axis=1) >= spec.risk_free):
        warnings.warn("no losing outcome: log growth is unbounded, "
                      "optimum pinned at the leverage cap", stacklevel=2)
    return OptimalRatios(q, value, bool(q.sum() >= cap - 1e-9))


def information_value(pred: Distribution, prior: Distribution,
                      spec: PortfolioSpec, cap: float = 1.0) -> float:
    """Predictive information value sum_i P(x_i|theta) log2 [R_i(q**)/R_i(q*)].

    q* optimizes against the prior, q** against the prediction; evaluated
    under the prediction the value is nonnegative by construction.  To get
    the actual (learning-stage) value, pass the empirical posterior as
    ``pred``.
    """
    q_star = optimize_ratios(prior, spec, cap).q
    q_sstar = optimize_ratios(pred, spec, cap).q
    r_star = spec.gross_returns(q_star)
    r_sstar = spec.gross_returns(q_sstar)
    live = pred.probs > 0
    if np.any(live & ((r_star <= 0) | (r_sstar <= 0))):
        raise RuinReturn("ruined return inside information value")
    return float(np.sum(pred.probs[live] *
                        np.log2(r_sstar[live] / r_star[live])))
