"""Multi-label classification and the iterative MaxMI partition search.

The MaxMI loop alternates two matchings: rebuild the semantic channel from
the partition-induced joint (Matching I), then reassign every z point to
the label with the highest conditional information reward (Matching II),
until the partition repeats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, MaxIterExceeded, NoTrueLabel
from .measures import shannon_mi
from .prob import Distribution, JointTable

INFO_FLOOR = -1e12   # stands in for log2(0) in reward comparisons


def multilabel_classify(x_index: int, channel, logical_probs) -> int:
    """Pick the label maximizing log2[T(theta_j|x) / T(theta_j)].

    Ties break toward the smallest logical probability (the most specific
    label), then toward the lowest index, so rarely used but perfectly
    true labels beat broad ones.
    """
    t_theta = np.asarray(logical_probs, dtype=float)
    truths = np.asarray(channel.columns[x_index], dtype=float)
    if len(truths) != len(t_theta):
        raise DimensionMismatch("logical probabilities do not match channel")
    if np.all(truths <= 0):
        raise NoTrueLabel(f"no label is true at x index {x_index}")
    best = None
    for j, (t, tt) in enumerate(zip(truths, t_theta)):
        info = math.log2(t / tt) if t > 0 else INFO_FLOOR
        key = (info, -tt, -j)
        if best is None or key > best[0]:
            best = (key, j)
    return best[1]


@dataclass(frozen=True)
class Partition:
    """Label assignment for every z-grid element."""

    assignment: np.ndarray
    n_labels: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=int)
        object.__setattr__(self, "assignment", a)
        if np.any(a < 0) or np.any(a >= self.n_labels):
            raise DimensionMismatch("assignment index out of range")
        a.setflags(write=False)

    def key(self) -> bytes:
        return self.assignment.tobytes()


@dataclass
class MaxMIStep:
    iteration: int
    shannon_mi: float
    semantic_mi: float
    assignment: np.ndarray


@dataclass
class MaxMITrace:
    steps: List[MaxMIStep] = field(default_factory=list)
    oscillated: bool = False
    dropped_labels: List[int] = field(default_factory=list)


def _induced_joint(px: np.ndarray, pzx: np.ndarray,
                   assignment: np.ndarray, n_labels: int) -> np.ndarray:
    joint = np.zeros((len(px), n_labels))
    for j in range(n_labels):
        mask = assignment == j
        if mask.any():
            joint[:, j] = px * pzx[:, mask].sum(axis=1)
    return joint


def _mi_of(joint: np.ndarray) -> float:
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    nz = joint > 0
    denom = np.outer(px, py)
    return float(np.sum(joint[nz] * np.log2(joint[nz] / denom[nz])))


def maxmi_classify(px: Distribution, pzx, init: Partition,
                   max_iter: int = 50) -> Tuple[Partition, MaxMITrace]:
    """MaxMI classification of a discretized observable z.

    px is the class prior, pzx the rows P(z|x) over the z grid, init the
    starting partition of the grid.  Returns the converged partition and a
    per-iteration trace of Shannon and semantic mutual information.

    A label that loses every z keeps its previous truth column for one
    more iteration; if still empty it is dropped (with a warning).  If the
    partition cycles with period > 1, the best-MI member of the cycle is
    returned with the trace flagged as oscillated.
    """
    P = np.asarray(pzx, dtype=float)
    if P.shape[0] != len(px):
        raise DimensionMismatch(f"pzx rows {P.shape[0]} vs classes {len(px)}")
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-6):
        raise DimensionMismatch("pzx rows must be distributions over z")
    if len(init.assignment) != P.shape[1]:
        raise DimensionMismatch("init partition does not cover the z grid")

    n_labels = init.n_labels
    pxv = px.probs
    pz = pxv @ P
    pxgz = (pxv[:, None] * P) / pz[None, :]        # P(x|z), columns over z

    assignment = init.assignment.copy()
    active = np.ones(n_labels, dtype=bool)
    empty_streak = np.zeros(n_labels, dtype=int)
    last_cols: List[Optional[np.ndarray]] = [None] * n_labels
    last_ttheta = np.full(n_labels, np.nan)
    trace = MaxMITrace()
    seen = {}

    for it in range(1, max_iter + 1):
        joint = _induced_joint(pxv, P, assignment, n_labels)
        py = joint.sum(axis=0)

        # Matching I: matched truth columns for populated labels, carryover
        # for labels that just emptied out.
        cols = np.zeros((len(pxv), n_labels))
        t_theta = np.zeros(n_labels)
        for j in range(n_labels):
            if not active[j]:
                continue
            if py[j] > 0:
                m = joint[:, j] / (pxv * py[j])
                cols[:, j] = m / m.max()
                t_theta[j] = pxv @ cols[:, j]
                empty_streak[j] = 0
                last_cols[j] = cols[:, j]
                last_ttheta[j] = t_theta[j]
            else:
                empty_streak[j] += 1
                if last_cols[j] is None or empty_streak[j] > 1:
                    active[j] = False
                    trace.dropped_labels.append(j)
                    warnings.warn(f"label {j} lost all z points; dropped",
                                  stacklevel=2)
                else:
                    cols[:, j] = last_cols[j]
                    t_theta[j] = last_ttheta[j]

        if not active.any():
            raise MaxIterExceeded("every label collapsed", partial=trace)

        with np.errstate(divide="ignore"):
            reward_x = np.where(cols > 0, np.log2(
                np.maximum(cols, 1e-300) / t_theta[None, :]), INFO_FLOOR)
        reward_x[:, ~active] = INFO_FLOOR

        shmi = _mi_of(joint)
        semi = float(np.nansum(joint * np.where(
            joint > 0, reward_x, 0.0)))
        trace.steps.append(MaxMIStep(it, shmi, semi, assignment.copy()))

        # Matching II: reassign each z to the best conditional reward.
        reward_z = pxgz.T @ reward_x                 # (n_z, n_labels)
        new_assignment = reward_z.argmax(axis=1)

        if np.array_equal(new_assignment, assignment):
            return Partition(assignment, n_labels), trace

        key = new_assignment.tobytes()
        if key in seen:
            # cycle with period > 1: return the best-MI member seen so far
            trace.oscillated = True
            warnings.warn("partition oscillates; returning best-MI member",
                          stacklevel=2)
            best = max(trace.steps, key=lambda s: s.shannon_mi)
            return Partition(best.assignment, n_labels), trace
        seen[assignment.tobytes()] = it
        assignment = new_assignment

    raise MaxIterExceeded(f"no fixed point within {max_iter} iterations",
                          partial=trace)


def threshold_partition(z_grid, threshold: float, n_labels: int = 2,
                        above_label: int = 1) -> Partition:
    """Binary partition of a numeric grid at a threshold."""
    z = np.asarray(z_grid, dtype=float)
    a = np.where(z >= threshold, above_label, 1 - above_label)
    return Partition(a, n_labels)


def exhaustive_threshold_mi(px: Distribution, pzx, z_grid) -> Tuple[float, float]:
    """Brute-force oracle: best (MI, threshold) over all grid thresholds."""
    P = np.asarray(pzx, dtype=float)
    z = np.asarray(z_grid, dtype=float)
    best = (-math.inf, z[0])
    for t in z:
        joint = _induced_joint(px.probs, P, (z >= t).astype(int), 2)
        mi = _mi_of(joint)
        if mi > best[0]:
            best = (mi, float(t))
    return best
