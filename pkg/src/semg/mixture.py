"""EnM fitting of 1-D Gaussian mixtures and the Gaussian channel variant.

One outer iteration is: Matching 1 (channel update P(y_j|x) followed by the
marginal update P(y_j), repeated n_inner times), then Matching 2 (component
refit by weighted moments).  EM is n_inner = 1, E3M is n_inner = 3.

Every iteration records the exact convergence identity

    H(P || Ptheta) = R - G + H(P+1(y) || P(y))

whose residual stays at rounding level regardless of the state; R and G are
the Shannon and semantic information of the freshly matched channel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, MaxIterExceeded
from .prob import Distribution, TruthParam

PARAM_MOVE_TOL = 1e-8


@dataclass(frozen=True)
class MixtureParams:
    weights: np.ndarray
    mus: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.mus, dtype=float)
        s = np.asarray(self.sigmas, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "mus", m)
        object.__setattr__(self, "sigmas", s)
        if not (len(w) == len(m) == len(s)) or len(w) == 0:
            raise DimensionMismatch("component arrays must share a length >= 1")
        if abs(w.sum() - 1.0) > 1e-9 or np.any(w < 0):
            raise DimensionMismatch("weights must be a distribution")
        if np.any(s <= 0):
            raise DimensionMismatch("sigmas must be positive")
        for a in (w, m, s):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.weights)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.mus, self.sigmas, self.weights])


@dataclass
class EnMTraceRow:
    iteration: int
    R_bits: float
    G_bits: float
    Q_nats: float               # complete-data log-likelihood, per sample
    H_bits: float               # H(P || Ptheta) before this iteration's update
    identity_residual: float


@dataclass
class EnMTrace:
    rows: List[EnMTraceRow] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    collapses: List[Tuple[int, int]] = field(default_factory=list)
    final_H_bits: float = math.nan
    # smallest per-iteration G change achieved by Matching 2 under a fixed
    # channel; the moment refit maximizes G, so this never goes negative
    min_refit_gain: float = math.inf


def _kl_bits(p: np.ndarray, q: np.ndarray) -> float:
    nz = p > 0
    if np.any(nz & (q <= 0)):
        return math.inf
    return float(np.sum(p[nz] * np.log2(p[nz] / q[nz])))


def gaussian_components(x: np.ndarray, mus, sigmas) -> np.ndarray:
    """Grid-normalized Gaussian rows P(x|theta_j), shape (n, len(x))."""
    mus = np.asarray(mus, dtype=float)[:, None]
    sigmas = np.asarray(sigmas, dtype=float)[:, None]
    comp = np.exp(-((x[None, :] - mus) ** 2) / (2.0 * sigmas ** 2))
    return comp / comp.sum(axis=1, keepdims=True)


def convergence_identity(px: np.ndarray, components: np.ndarray,
                         weights: np.ndarray) -> float:
    """Residual of the H = R - G + KL(P+1 || P(y)) identity at this state.

    The channel is freshly computed from (weights, components), so the
    residual is an algebraic zero up to rounding for any state whatsoever.
    """
    ptheta = weights @ components
    gamma = (weights[:, None] * components) / ptheta[None, :]
    wplus = gamma @ px
    H = _kl_bits(px, ptheta)
    mass = px[None, :] * gamma
    nz = mass > 0
    R = float(np.sum(mass[nz] * np.log2((gamma / wplus[:, None])[nz])))
    G = float(np.sum(mass[nz] * np.log2((components / px[None, :])[nz])))
    return abs(H - (R - G + _kl_bits(wplus, weights)))


def _check_grid_coverage(target: Distribution):
    # edge cells carrying visible mass mean the grid clips the tails
    edge = float(target.probs[0] + target.probs[-1])
    if edge > 1e-6:
        warnings.warn(f"grid may clip the target tails (edge mass {edge:.2e})",
                      stacklevel=3)


class _EnMDriver:
    """Shared Matching 1 / Matching 2 loop; subclasses fix the family."""

    def __init__(self, target: Distribution, n_inner: int, stop_tol: float,
                 max_iter: int):
        if n_inner < 1:
            raise DimensionMismatch("n_inner must be >= 1")
        self.x = target.numeric_support()
        _check_grid_coverage(target)
        self.P = target.probs
        step = float(np.min(np.diff(self.x))) if len(self.x) > 1 else 1.0
        self.sigma_floor = 0.5 * step
        self.n_inner = n_inner
        self.stop_tol = stop_tol
        self.max_iter = max_iter
        self.trace = EnMTrace()

    # family hooks -------------------------------------------------------
    def components(self) -> np.ndarray:
        raise NotImplementedError

    def refit(self, gamma, ptheta_last, w_new, iteration):
        raise NotImplementedError

    def state_vector(self) -> np.ndarray:
        return np.concatenate([self.mus, self.sigmas, self.w])

    # ---------------------------------------------------------------------
    def _reseed_collapsed(self, mus, sigmas, w, iteration):
        collapsed = sigmas < self.sigma_floor
        if not collapsed.any():
            return mus, sigmas, w
        n = len(mus)
        safe = np.maximum(sigmas, self.sigma_floor)
        ptheta = w @ gaussian_components(self.x, mus, safe)
        residual = self.P - ptheta
        mus = mus.copy(); sigmas = sigmas.copy(); w = w.copy()
        for j in np.nonzero(collapsed)[0]:
            self.trace.collapses.append((iteration, int(j)))
            warnings.warn(f"component {j} collapsed; reseeding", stacklevel=4)
            mus[j] = float(self.x[int(np.argmax(residual))])
            sigmas[j] = max((self.x.max() - self.x.min()) / 20.0,
                            self.sigma_floor)
            others = np.arange(n) != j
            w[j] = 1.0 / n
            if w[others].sum() > 0:
                w[others] *= (1.0 - 1.0 / n) / w[others].sum()
        return mus, sigmas, w

    def run(self):
        P, trace = self.P, self.trace
        prev_state = self.state_vector()
        for it in range(1, self.max_iter + 1):
            comp = self.components()
            w = self.w
            ptheta = w @ comp
            H_before = _kl_bits(P, ptheta)

            # Matching 1, first pass: fresh channel, trace bookkeeping
            gamma = (w[:, None] * comp) / ptheta[None, :]
            wplus = gamma @ P
            mass = P[None, :] * gamma
            nz = mass > 0
            R = float(np.sum(mass[nz] * np.log2((gamma / wplus[:, None])[nz])))
            G = float(np.sum(mass[nz] * np.log2((comp / P[None, :])[nz])))
            with np.errstate(divide="ignore"):
                logwc = np.log(np.maximum(w[:, None] * comp, 1e-300))
            Q = float(np.sum(mass * logwc))
            resid = abs(H_before - (R - G + _kl_bits(wplus, w)))
            trace.rows.append(EnMTraceRow(it, R, G, Q, H_before, resid))

            ptheta_last = ptheta
            w = wplus
            for _ in range(1, self.n_inner):
                ptheta_last = w @ comp
                gamma = (w[:, None] * comp) / ptheta_last[None, :]
                w = gamma @ P

            mass = P[None, :] * gamma
            nz = mass > 0
            G_before = float(np.sum(mass[nz] *
                                    np.log2((comp / P[None, :])[nz])))
            self.refit(gamma, ptheta_last, w, it)
            comp_new = self.components()
            G_after = float(np.sum(mass[nz] *
                                   np.log2((comp_new / P[None, :])[nz])))
            if not trace.collapses or trace.collapses[-1][0] != it:
                trace.min_refit_gain = min(trace.min_refit_gain,
                                           G_after - G_before)

            H_after = _kl_bits(P, self.w @ comp_new)
            trace.iterations = it
            trace.final_H_bits = H_after
            if H_after < self.stop_tol:
                trace.converged = True
                return
            state = self.state_vector()
            if np.abs(state - prev_state).max() < PARAM_MOVE_TOL:
                return
            prev_state = state
        raise MaxIterExceeded(
            f"mixture fit did not converge in {self.max_iter} iterations "
            f"(H = {trace.final_H_bits:.3e} bits)", partial=trace)

    def result(self) -> MixtureParams:
        return MixtureParams(self.w / self.w.sum(), self.mus, self.sigmas)


class _GaussianEnM(_EnMDriver):
    def __init__(self, target, init: MixtureParams, n_inner, stop_tol, max_iter):
        super().__init__(target, n_inner, stop_tol, max_iter)
        self.mus = init.mus.copy()
        self.sigmas = init.sigmas.copy()
        self.w = init.weights.copy()

    def components(self):
        return gaussian_components(self.x, self.mus, self.sigmas)

    def refit(self, gamma, ptheta_last, w_new, iteration):
        # classical M-step: moments under P(x) gamma_j(x)
        wt = gamma * self.P[None, :]
        denom = wt.sum(axis=1)
        mus = (wt @ self.x) / denom
        sigmas = np.sqrt((wt * (self.x[None, :] - mus[:, None]) ** 2)
                         .sum(axis=1) / denom)
        self.mus, self.sigmas, self.w = self._reseed_collapsed(
            mus, sigmas, w_new, iteration)


class _GaussianChannelEnM(_EnMDriver):
    """Components are Gaussian truth functions; likelihoods their shapes."""

    def __init__(self, target, init_truths, init_weights, n_inner, stop_tol,
                 max_iter, init_columns=None):
        super().__init__(target, n_inner, stop_tol, max_iter)
        init_truths = list(init_truths)
        w0 = np.asarray(init_weights, dtype=float)
        if len(init_truths) != len(w0):
            raise DimensionMismatch("one truth function per weight required")
        self.mus = np.array([p.mu for p in init_truths], dtype=float)
        self.sigmas = np.array([p.sigma for p in init_truths], dtype=float)
        self.w = w0.copy()
        if init_columns is not None:
            T0 = np.asarray(init_columns, dtype=float)
            if T0.shape != (len(w0), len(self.x)):
                raise DimensionMismatch(
                    "init_columns must be (n_components, n_grid)")
            # max-normalize so any uniform rescaling of a column cancels
            self.T = T0 / T0.max(axis=1, keepdims=True)
        else:
            self.T = self._truth_columns()

    def _truth_columns(self):
        return np.exp(-((self.x[None, :] - self.mus[:, None]) ** 2)
                      / (2.0 * self.sigmas[:, None] ** 2))

    def components(self):
        return self.T / self.T.sum(axis=1, keepdims=True)

    def refit(self, gamma, ptheta_last, w_new, iteration):
        # Matching 2 row: normalized P(x) T(theta_j|x) / Ptheta(x)
        row = self.P[None, :] * self.T / ptheta_last[None, :]
        row = row / row.sum(axis=1, keepdims=True)
        mus = row @ self.x
        sigmas = np.sqrt(((self.x[None, :] - mus[:, None]) ** 2 * row)
                         .sum(axis=1))
        self.mus, self.sigmas, self.w = self._reseed_collapsed(
            mus, sigmas, w_new, iteration)
        self.T = self._truth_columns()


def enm_fit(target: Distribution, init: MixtureParams, n_inner: int = 1,
            stop_tol: float = 1e-5, max_iter: int = 2000
            ) -> Tuple[MixtureParams, EnMTrace]:
    """Fit a Gaussian mixture to a target distribution on a numeric grid.

    Returns the fitted parameters and a per-iteration trace of
    (R, G, Q, H, identity residual).  Q is in natural-log units per sample
    and is recorded for inspection only; it is not monotone.
    """
    driver = _GaussianEnM(target, init, n_inner, stop_tol, max_iter)
    driver.run()
    return driver.result(), driver.trace


def gcmm_fit(target: Distribution, init_truths, init_weights,
             n_inner: int = 1, stop_tol: float = 1e-5, max_iter: int = 2000,
             init_columns: Optional[np.ndarray] = None
             ) -> Tuple[MixtureParams, EnMTrace]:
    """Gaussian channel mixture: the state is truth functions, not pdfs.

    Each component is a Gaussian truth function (peak 1) with a mixing
    weight; its likelihood is the normalized truth shape.  Matching 2
    re-reads (mu_j, sigma_j) from the normalized P(x)T(theta_j|x)/Ptheta(x)
    row.  ``init_columns`` optionally replaces the initial truth columns;
    they are max-normalized first, so scaling a column by any constant
    leaves the whole trajectory unchanged.
    """
    driver = _GaussianChannelEnM(target, init_truths, init_weights, n_inner,
                                 stop_tol, max_iter, init_columns)
    driver.run()
    return driver.result(), driver.trace


def pointwise_match_defect(target: Distribution, params: MixtureParams,
                           mass_floor: float = 1e-4) -> float:
    """max |Ptheta(x)/P(x) - 1| over grid points with visible target mass."""
    x = target.numeric_support()
    comp = gaussian_components(x, params.mus, params.sigmas)
    ptheta = params.weights @ comp
    mask = target.probs > mass_floor * target.probs.max()
    return float(np.abs(ptheta[mask] / target.probs[mask] - 1.0).max())


def mixture_distribution(grid, params: MixtureParams) -> Distribution:
    """Discretized mixture density as a Distribution on the grid."""
    x = np.asarray(grid, dtype=float)
    comp = gaussian_components(x, params.mus, params.sigmas)
    probs = params.weights @ comp
    return Distribution(tuple(x.tolist()), probs / probs.sum())
