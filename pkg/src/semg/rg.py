"""Rate-fidelity function R(G) and the classical rate-distortion solution.

Both solvers share the same alternating fixed point on the label marginal
(the Blahut-Arimoto inner loop):

    P(y_j|x_i) = P(y_j) w_ij / Z_i,   Z_i = sum_k P(y_k) w_ik
    P(y_j)     = sum_i P(x_i) P(y_j|x_i)

with w = m^s for R(G) and w = exp(s d) for R(D).  For a relatedness model
m the per-cell reward is

    I_ij = log2[ m(x_i,y_j) / sum_x P(x) m(x,y_j) ],

which reduces to log2 m when the model matches the source (the denominator
is then identically 1), making R(1) = G(1) with Z_i = 1 for all i.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NonConvergence,
    NonPositiveModel,
    ZeroCoverage,
)
from .prob import Distribution, SemanticChannel, logical_probability, semantic_bayes

FIXED_POINT_TOL = 1e-10
MAX_SWEEPS = 1000
MODEL_FLOOR = 1e-300    # 0^s guard for positive s


@dataclass(frozen=True)
class RGPoint:
    s: float
    R: float                    # bits
    G: float                    # bits
    channel: np.ndarray         # rows P(y_j | x_i)
    py: Distribution
    efficiency: Optional[float]
    left_branch: bool = False   # s < 0: interpret as the left bowl branch
    sweeps: int = 0


@dataclass
class RGCurve:
    points: List[RGPoint]
    px: Distribution
    gaps: List[Tuple[float, str]] = field(default_factory=list)


def _fixed_point(px: np.ndarray, weights: np.ndarray, py0: np.ndarray):
    """Alternate channel/marginal updates until the marginal settles."""
    py = py0.copy()
    for sweep in range(1, MAX_SWEEPS + 1):
        scaled = py[None, :] * weights
        z = scaled.sum(axis=1)
        if np.any(z <= 0):
            raise NonPositiveModel("partition function vanished")
        chan = scaled / z[:, None]
        py_new = px @ chan
        defect = float(np.abs(py_new - py).max())
        py = py_new
        if defect < FIXED_POINT_TOL:
            return py, chan, z, sweep
    raise NonConvergence(
        f"marginal fixed point not reached in {MAX_SWEEPS} sweeps",
        defect=defect)


def _prepare_model(m_model) -> np.ndarray:
    m = np.asarray(m_model, dtype=float)
    if np.any(~np.isfinite(m)) or np.any(m < 0):
        raise NonPositiveModel("relatedness model must be finite and nonnegative")
    if np.any(m == 0):
        warnings.warn("zero entries in relatedness model clipped to 1e-300",
                      stacklevel=3)
        m = np.maximum(m, MODEL_FLOOR)
    return m


def rg_point(px: Distribution, m_model, s: float,
             py_init: Optional[Distribution] = None) -> RGPoint:
    """One point of the R(G) curve at the trade-off parameter s = dR/dG.

    The model columns are normalized by sum_x P(x) m(x,y_j) before use (a
    no-op for a matched model), so the exponentiated weights and the
    per-cell reward I_ij describe the same quantity and R is the actual
    mutual information of the solved channel, hence nonnegative even for
    mismatched models.
    """
    m = _prepare_model(m_model)
    if m.shape[0] != len(px):
        raise DimensionMismatch(f"model rows {m.shape[0]} vs source {len(px)}")
    if not math.isfinite(s):
        raise DimensionMismatch("s must be finite")
    ny = m.shape[1]
    py0 = (np.full(ny, 1.0 / ny) if py_init is None
           else np.asarray(py_init.probs, dtype=float))
    m = m / (px.probs @ m)[None, :]
    with np.errstate(over="raise"):
        weights = m ** s
    py, chan, z, sweeps = _fixed_point(px.probs, weights, py0)

    reward = np.log2(m)                       # I_ij after normalization
    G = float(np.sum(px.probs[:, None] * chan * reward))
    R = float(s * G - px.probs @ np.log2(z))
    if R < 0 and R > -1e-12:
        R = 0.0
    labels = tuple(f"y{j + 1}" for j in range(ny)) if py_init is None \
        else tuple(py_init.support)
    eff = None if R <= 0 else G / R
    return RGPoint(s, R, G, chan, Distribution(labels, py), eff,
                   left_branch=s < 0, sweeps=sweeps)


def rg_curve(px: Distribution, m_model, s_grid: Sequence[float]) -> RGCurve:
    """Sample the R(G) curve, warm-starting each point from the previous."""
    s_values = list(s_grid)
    if sorted(s_values) != s_values:
        raise DimensionMismatch("s grid must be sorted ascending")
    curve = RGCurve([], px)
    warm: Optional[Distribution] = None
    for s in s_values:
        try:
            pt = rg_point(px, m_model, s, py_init=warm)
        except (NonConvergence, NonPositiveModel) as err:
            curve.gaps.append((s, type(err).__name__))
            continue
        curve.points.append(pt)
        warm = pt.py
    return curve


def rd_shannon(px: Distribution, d_matrix, s: float):
    """Classical parametric R(D) solution for a discrete memoryless source.

    Returns (D, R_bits, channel) for the given s <= 0.  With d = -ln T this
    is the truth-function generalization of the same machinery.
    """
    d = np.asarray(d_matrix, dtype=float)
    if np.any(~np.isfinite(d)) or np.any(d < 0):
        raise NonPositiveModel("distortion matrix must be finite and nonnegative")
    if d.shape[0] != len(px):
        raise DimensionMismatch(f"distortion rows {d.shape[0]} vs source {len(px)}")
    if s > 0:
        raise DimensionMismatch("R(D) parameter s must be <= 0")
    ny = d.shape[1]
    weights = np.exp(s * d)
    py, chan, z, _ = _fixed_point(px.probs, weights, np.full(ny, 1.0 / ny))
    D = float(np.sum(px.probs[:, None] * chan * d))
    R_nats = s * D - float(px.probs @ np.log(z))
    R = max(R_nats / math.log(2.0), 0.0)
    return D, R, chan


def min_rate_zero_distortion(channel: SemanticChannel, px: Distribution,
                             py: Distribution, mode: str = "auto") -> float:
    """Minimum rate for zero-distortion decoding over a label coverage.

    Crisp columns (T in {0,1}): the rate is the coverage entropy
    -sum_j P(y_j) log2 T(theta_j), which collapses to H(Y) for a partition.
    Fuzzy columns: coverage entropy minus fuzzy entropy, the latter taken
    under the joint P(y_j) P(x|theta_j).
    """
    if tuple(py.support) != channel.labels:
        raise DimensionMismatch("py labels do not match channel")
    T = channel.columns
    crisp = bool(np.all((T == 0.0) | (T == 1.0)))
    if mode == "crisp" and not crisp:
        raise DimensionMismatch("crisp mode requires truth values in {0, 1}")
    if mode not in ("auto", "crisp", "fuzzy"):
        raise DimensionMismatch(f"unknown mode {mode!r}")
    use_crisp = crisp if mode == "auto" else (mode == "crisp")

    t_theta = logical_probability(channel, px)
    used = py.probs > 0
    if np.any(used & (t_theta <= 0)):
        raise ZeroCoverage("used label covers nothing")
    coverage = float(-np.sum(py.probs[used] * np.log2(t_theta[used])))
    if use_crisp:
        return coverage
    fuzzy = 0.0
    for j in np.nonzero(used)[0]:
        post = semantic_bayes(px, T[:, j]).probs
        nz = post > 0
        fuzzy -= float(py.probs[j] * np.sum(post[nz] * np.log2(T[nz, j])))
    return coverage - fuzzy
