"""Closed-loop simulation: truth generation plus both estimators.

``generate_truth`` rolls the true model forward under seeded portable noise;
``run_estimators`` replays a measurement record through the filter bank,
the minimax predictor, and the Bayesian baseline.  ``simulate`` chains the
two.  Keeping the stages separate lets tests feed hand-crafted or perturbed
measurement records through the estimators.

Row timing: row t of a trace holds the noise-free output z_t = H_true x_t
and the predictions of it formed from y_0 .. y_{t-1} only.  Row 0 is the
prior prediction, before any data.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bayes as _bayes
from . import filter_bank, minimax, riccati
from .exceptions import GammaInfeasible, IndexOutOfRange
from .model_bank import ModelSet
from .rng import Xorshift64Star

NOISE_KINDS = ("gaussian", "uniform-bounded", "zero")
INPUT_KINDS = ("none", "sinusoid", "sequence")


@dataclass(frozen=True)
class NoiseSpec:
    """How one noise source is drawn: kind, amplitude, stream seed."""

    kind: str = "gaussian"
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.scale < 0:
            raise ValueError("noise scale must be nonnegative")

    def stream(self, length: int, width: int) -> np.ndarray:
        """Draw a (length, width) block from this source's own stream."""
        out = np.zeros((length, width))
        if self.kind == "zero" or self.scale == 0.0:
            return out
        rng = Xorshift64Star(self.seed)
        for t in range(length):
            for j in range(width):
                if self.kind == "gaussian":
                    out[t, j] = self.scale * rng.normal()
                else:
                    out[t, j] = self.scale * (2.0 * rng.uniform() - 1.0)
        return out


@dataclass(frozen=True)
class InputSpec:
    """Known input: none, sin(rate * t), or an explicit sequence."""

    kind: str = "none"
    rate: float = 0.2
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.kind == "sequence" and self.values is None:
            raise ValueError("sequence input needs values")

    def build(self, horizon: int, p: int) -> np.ndarray:
        if p == 0:
            return np.zeros((horizon, 0))
        if self.kind == "none":
            return np.zeros((horizon, p))
        if self.kind == "sinusoid":
            t = np.arange(horizon)
            return np.tile(np.sin(self.rate * t)[:, None], (1, p))
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape != (horizon, p):
            raise ValueError(
                f"input sequence has shape {vals.shape}, need ({horizon}, {p})")
        return vals.copy()


@dataclass(frozen=True)
class SimulationTrace:
    """Per-step record of one run; every array has ``horizon`` rows.

    ``x`` additionally carries the terminal state, so it has one extra row.
    ``yhat_models`` holds each model's own output prediction H_i xb_i,
    ``c`` the accumulated prediction costs, ``mu`` the Bayesian posterior,
    ``lam`` the minimax certificate weights, all as logged BEFORE absorbing
    that row's measurement.
    """

    horizon: int
    true_model: int
    u: np.ndarray             # (N, p)
    x: np.ndarray             # (N + 1, n)
    y: np.ndarray             # (N, m)
    z: np.ndarray             # (N, m)
    yhat_minimax: np.ndarray  # (N, m)
    yhat_bayes: np.ndarray    # (N, m)
    yhat_models: np.ndarray   # (N, K, m)
    c: np.ndarray             # (N, K)
    mu: np.ndarray            # (N, K)
    J_star: np.ndarray        # (N,)
    lam: np.ndarray           # (N, K)


def generate_truth(models: ModelSet, true_model: int, horizon: int,
                   process_noise: NoiseSpec, measurement_noise: NoiseSpec,
                   input_spec: InputSpec = InputSpec(), x0=None):
    """Roll the true model forward.  Returns (u, x, y, z).

    x has horizon + 1 rows (terminal state included); y_t = H x_t + v_t and
    z_t = H x_t for t < horizon.  x0 defaults to the bank's prior mean.
    """
    if not 0 <= true_model < models.K:
        raise IndexOutOfRange(
            f"true_model {true_model} outside 0..{models.K - 1}")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    F = models.F[true_model]
    H = models.H[true_model]
    B = models.B[true_model] if models.p > 0 else None

    u = input_spec.build(horizon, models.p)
    w = process_noise.stream(horizon, models.n)
    v = measurement_noise.stream(horizon, models.m)

    x = np.zeros((horizon + 1, models.n))
    x[0] = models.xhat0 if x0 is None else np.asarray(x0, dtype=float).reshape(models.n)
    y = np.zeros((horizon, models.m))
    z = np.zeros((horizon, models.m))
    for t in range(horizon):
        z[t] = H @ x[t]
        y[t] = z[t] + v[t]
        x[t + 1] = F @ x[t] + w[t]
        if B is not None:
            x[t + 1] += B @ u[t]
    return u, x, y, z


def _check_feasible(models: ModelSet, gains) -> None:
    feasible = np.asarray(gains.feasible)
    if feasible.all():
        return
    if feasible.ndim == 1:
        i = int(np.nonzero(~feasible)[0][0])
        P = gains.cov(0, i)
        t = None
    else:
        i, t = (int(v) for v in np.argwhere(~feasible)[0])
        P = gains.cov(t, i)
    from .linalg import max_eig_sym
    lam = max_eig_sym(models.H[i] @ P @ models.H[i].T)
    raise GammaInfeasible(
        f"model {i}" + ("" if t is None else f" at t={t}")
        + f": lambda_max(H P H^T) = {lam:.6g} >= gamma^2 = {models.gamma ** 2:.6g}",
        lambda_max=lam, gamma_sq=models.gamma ** 2, model=i, t=t)


def run_estimators(models: ModelSet, y, u=None, stationary: bool = False,
                   true_model: int = 0, x=None, z=None,
                   run_minimax: bool = True, run_bayes: bool = True,
                   bayes_mode: str = "average",
                   tol: float = minimax.SOLVE_TOL,
                   max_iter: int = minimax.SOLVE_MAX_ITER) -> SimulationTrace:
    """Replay a measurement record through both estimators.

    Gamma-feasibility is checked for every model over the whole horizon
    (terminal covariance included) before any data is processed; an
    infeasible pair raises :class:`GammaInfeasible` immediately.

    Skipped estimators leave NaN columns.  ``x`` and ``z`` are carried into
    the trace when given (a pure-estimation replay may omit them).
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    N = y.shape[0]
    if u is None:
        u = np.zeros((N, models.p))
    else:
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            u = u[:, None]

    if stationary:
        gains = riccati.stationary_gains(models)
    else:
        gains = riccati.run_recursion(models, N)
    _check_feasible(models, gains)

    state = filter_bank.init(models, gains)
    posterior = _bayes.bayes_init(models)

    K, m = models.K, models.m
    tr_models = np.zeros((N, K, m))
    tr_c = np.zeros((N, K))
    tr_mu = np.zeros((N, K))
    tr_mini = np.full((N, m), np.nan)
    tr_bayes = np.full((N, m), np.nan)
    tr_J = np.full(N, np.nan)
    tr_lam = np.full((N, K), np.nan)

    for t in range(N):
        tr_c[t] = state.c
        tr_mu[t] = posterior.mu
        for i in range(K):
            tr_models[t, i] = models.H[i] @ state.xbreve[i]
        if run_minimax:
            est = minimax.solve(minimax.build_pieces(models, state),
                                tol=tol, max_iter=max_iter)
            tr_mini[t] = est.yhat
            tr_J[t] = est.value
            tr_lam[t] = est.weights
        if run_bayes:
            tr_bayes[t] = _bayes.bayes_estimate(posterior, state, mode=bayes_mode)
            posterior = _bayes.bayes_step(posterior, state, y[t])
        state = filter_bank.step(state, y[t], u[t] if models.p > 0 else None)

    x_arr = np.full((N + 1, models.n), np.nan) if x is None else np.asarray(x, dtype=float)
    z_arr = np.full((N, m), np.nan) if z is None else np.asarray(z, dtype=float).reshape(N, m)
    return SimulationTrace(
        horizon=N, true_model=true_model, u=u, x=x_arr, y=y, z=z_arr,
        yhat_minimax=tr_mini, yhat_bayes=tr_bayes, yhat_models=tr_models,
        c=tr_c, mu=tr_mu, J_star=tr_J, lam=tr_lam)


def simulate(models: ModelSet, true_model: int, horizon: int,
             process_noise: NoiseSpec = NoiseSpec(),
             measurement_noise: NoiseSpec = NoiseSpec(seed=1),
             input_spec: InputSpec = InputSpec(),
             stationary: bool = False, bayes_mode: str = "average",
             x0=None) -> SimulationTrace:
    """Generate truth and run both estimators over it."""
    u, x, y, z = generate_truth(models, true_model, horizon, process_noise,
                                measurement_noise, input_spec, x0=x0)
    return run_estimators(models, y, u=u, stationary=stationary,
                          true_model=true_model, x=x, z=z,
                          bayes_mode=bayes_mode)
