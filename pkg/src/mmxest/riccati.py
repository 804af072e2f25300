"""Riccati recursions, Kalman gains, and gamma-feasibility certificates.

The covariance recursion propagated per model is

    P' = Q + F P F^T - F P H^T (R + H P H^T)^{-1} H P F^T,

started from P0.  Its fixed point is the (estimation-form) algebraic
Riccati equation, solved here by plain fixed-point iteration of the same
recursion so that the stationary filter provably agrees with the
time-varying one in the limit.

A covariance P is gamma-feasible for output map H when

    lambda_max(H P H^T) < gamma^2   (strictly),

which guarantees the inner maximization of the prediction game is concave
and the minimax weight matrix (I - gamma^{-2} H P H^T)^{-1} exists.
Boundary cases are infeasible: the weight matrix is singular there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import FactorizationFailure, HorizonExceeded, NoConvergence
from .linalg import max_eig_sym, spd_solve, symmetrize
from .model_bank import ModelSet

ARE_TOL = 1e-10
ARE_MAX_ITER = 10000


def riccati_step(P, F, H, Q, R) -> np.ndarray:
    """One step of the covariance recursion; output is symmetrized."""
    PHt = P @ H.T
    S = symmetrize(R + H @ PHt)
    # S^{-1} H P F^T via Cholesky; S is PD for valid inputs.
    gain_term = spd_solve(S, PHt.T @ F.T, context="innovation covariance R + H P H^T")
    return symmetrize(Q + F @ P @ F.T - (F @ PHt) @ gain_term)


def kalman_gain(P, F, H, R) -> np.ndarray:
    """Gain K = F P H^T (R + H P H^T)^{-1}."""
    PHt = P @ H.T
    S = symmetrize(R + H @ PHt)
    return (F @ PHt) @ spd_solve(S, np.eye(S.shape[0]), context="innovation covariance R + H P H^T")


def innovation_covariance(P, H, R) -> np.ndarray:
    """S = R + H P H^T, symmetrized."""
    return symmetrize(R + H @ P @ H.T)


def check_gamma_feasibility(P, H, gamma) -> bool:
    """True iff lambda_max(H P H^T) < gamma^2, strictly."""
    return max_eig_sym(H @ P @ H.T) < gamma * gamma


@dataclass(frozen=True)
class RiccatiSequence:
    """Per-model covariances, gains, and feasibility flags over a horizon.

    Arrays are indexed [model, time]: ``P`` has N+1 covariances per model
    (t = 0..N), ``K_gain`` and ``S`` have N entries (t = 0..N-1), and
    ``feasible`` marks lambda_max(H_i P_{t,i} H_i^T) < gamma^2 per (i, t).
    """

    horizon: int
    P: np.ndarray        # (K, N+1, n, n)
    K_gain: np.ndarray   # (K, N, n, m)
    S: np.ndarray        # (K, N, m, m)
    feasible: np.ndarray  # (K, N+1) bool

    @property
    def n_models(self):
        return self.P.shape[0]

    @property
    def n_states(self):
        return self.P.shape[-1]

    @property
    def n_outputs(self):
        return self.S.shape[-1]

    @property
    def stationary(self):
        return False

    def cov(self, t, i) -> np.ndarray:
        if not 0 <= t <= self.horizon:
            raise HorizonExceeded(f"no covariance at t={t}; horizon is {self.horizon}")
        return self.P[i, t]

    def gain(self, t, i) -> np.ndarray:
        if not 0 <= t < self.horizon:
            raise HorizonExceeded(f"no gain at t={t}; horizon is {self.horizon}")
        return self.K_gain[i, t]

    def innovation_cov(self, t, i) -> np.ndarray:
        if not 0 <= t < self.horizon:
            raise HorizonExceeded(f"no innovation covariance at t={t}; horizon is {self.horizon}")
        return self.S[i, t]


@dataclass(frozen=True)
class AreSolution:
    """Fixed point of the Riccati recursion with convergence metadata."""

    P: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class StationaryGains:
    """Constant per-model gains from the algebraic Riccati equations."""

    P: np.ndarray        # (K, n, n)
    K_gain: np.ndarray   # (K, n, m)
    S: np.ndarray        # (K, m, m)
    feasible: np.ndarray  # (K,) bool
    solutions: tuple     # per-model AreSolution

    @property
    def n_models(self):
        return self.P.shape[0]

    @property
    def n_states(self):
        return self.P.shape[-1]

    @property
    def n_outputs(self):
        return self.S.shape[-1]

    @property
    def stationary(self):
        return True

    def cov(self, t, i) -> np.ndarray:
        return self.P[i]

    def gain(self, t, i) -> np.ndarray:
        return self.K_gain[i]

    def innovation_cov(self, t, i) -> np.ndarray:
        return self.S[i]


def run_recursion(models: ModelSet, N: int) -> RiccatiSequence:
    """Propagate the per-model Riccati recursions over t = 0..N.

    All models start from the shared P0.  Feasibility is certified at every
    time index, including the terminal one.  Factorization failures are
    re-raised with the time and model index attached.
    """
    if N < 0:
        raise ValueError(f"horizon must be >= 0, got {N}")
    K, n, m = models.K, models.n, models.m
    P = np.empty((K, N + 1, n, n))
    K_gain = np.empty((K, N, n, m))
    S = np.empty((K, N, m, m))
    feasible = np.empty((K, N + 1), dtype=bool)
    gsq = models.gamma ** 2
    for i in range(K):
        F, H = models.F[i], models.H[i]
        Pt = np.array(models.P0)
        for t in range(N + 1):
            P[i, t] = Pt
            feasible[i, t] = max_eig_sym(H @ Pt @ H.T) < gsq
            if t == N:
                break
            try:
                S[i, t] = innovation_covariance(Pt, H, models.R)
                K_gain[i, t] = kalman_gain(Pt, F, H, models.R)
                Pt = riccati_step(Pt, F, H, models.Q, models.R)
            except FactorizationFailure as exc:
                raise FactorizationFailure(f"model {i}, t={t}: {exc}") from None
    return RiccatiSequence(horizon=N, P=P, K_gain=K_gain, S=S, feasible=feasible)


def solve_are(F, H, Q, R, P_init, tol: float = ARE_TOL, max_iter: int = ARE_MAX_ITER) -> AreSolution:
    """Solve the stationary Riccati equation by fixed-point iteration.

    Iterates :func:`riccati_step` from ``P_init`` until the max-abs change
    is below ``tol``; the reported residual is the max-abs defect of the
    fixed-point equation at the returned iterate and is required to be
    within ``tol`` as well.

    Raises
    ------
    NoConvergence
        If ``max_iter`` steps do not reach tolerance (the last iterate is
        attached for diagnostics), or the iteration diverges to non-finite
        values.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    P = np.atleast_2d(np.asarray(P_init, dtype=float))
    F = np.atleast_2d(np.asarray(F, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    # overflow is a handled outcome here, not a warning-worthy event
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, max_iter + 1):
            Pn = riccati_step(P, F, H, Q, R)
            if not np.all(np.isfinite(Pn)):
                raise NoConvergence(f"Riccati iteration diverged after {it} steps", last=P)
            delta = float(np.max(np.abs(Pn - P)))
            P = Pn
            if delta < tol:
                residual = float(np.max(np.abs(riccati_step(P, F, H, Q, R) - P)))
                if residual <= tol:
                    return AreSolution(P=P, iterations=it, residual=residual)
    raise NoConvergence(f"no fixed point within {max_iter} iterations", last=P)


def stationary_gains(models: ModelSet, tol: float = ARE_TOL, max_iter: int = ARE_MAX_ITER) -> StationaryGains:
    """Solve the per-model AREs from P0 and package the constant gains."""
    K, n, m = models.K, models.n, models.m
    P = np.empty((K, n, n))
    K_gain = np.empty((K, n, m))
    S = np.empty((K, m, m))
    feasible = np.empty(K, dtype=bool)
    solutions = []
    gsq = models.gamma ** 2
    for i in range(K):
        try:
            sol = solve_are(models.F[i], models.H[i], models.Q, models.R,
                            models.P0, tol=tol, max_iter=max_iter)
        except NoConvergence as exc:
            raise NoConvergence(f"model {i}: {exc}", last=exc.last) from None
        solutions.append(sol)
        P[i] = sol.P
        K_gain[i] = kalman_gain(sol.P, models.F[i], models.H[i], models.R)
        S[i] = innovation_covariance(sol.P, models.H[i], models.R)
        feasible[i] = max_eig_sym(models.H[i] @ sol.P @ models.H[i].T) < gsq
    return StationaryGains(P=P, K_gain=K_gain, S=S, feasible=feasible,
                           solutions=tuple(solutions))
