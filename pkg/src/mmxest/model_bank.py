"""Finite family of candidate linear models and the shared game weights.

A model set collects K candidate pairs (F_i, H_i) for the dynamics

    x_{t+1} = F_i x_t + B_i u_t + w_t
    y_t     = H_i x_t + v_t

together with the positive-definite weights Q, R, P0 of the disturbance
penalty, the attenuation level gamma, and the nominal initial state.
The weights are shared across models; per-model weights are a possible
extension but are deliberately not supported here.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Mapping

import numpy as np

from .exceptions import (
    DimensionMismatch,
    EmptyModelSet,
    NonpositiveGamma,
    NotPositiveDefinite,
)
from .linalg import check_spd


@dataclass(frozen=True, eq=False)
class ModelSet:
    """Validated family of candidate models. Immutable after validation.

    Attributes
    ----------
    K, n, m, p : int
        Number of models, state dimension, output dimension, and known-input
        dimension (p = 0 when the system has no input).
    F : tuple of (n, n) ndarray
        State transition matrix per model.
    H : tuple of (m, n) ndarray
        Output map per model.
    B : tuple of (n, p) ndarray
        Known-input map per model; empty tuple when p = 0.
    Q, R, P0 : ndarray
        Symmetric positive-definite disturbance, measurement, and
        initial-state weights, shared by all models.
    gamma : float
        Disturbance attenuation level, > 0.
    xhat0 : (n,) ndarray
        Nominal initial state.
    """

    K: int
    n: int
    m: int
    p: int
    F: tuple
    H: tuple
    B: tuple
    Q: np.ndarray
    R: np.ndarray
    P0: np.ndarray
    gamma: float
    xhat0: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, ModelSet):
            return NotImplemented
        if (self.K, self.n, self.m, self.p) != (other.K, other.n, other.m, other.p):
            return False
        if self.gamma != other.gamma:
            return False
        for name in ("F", "H", "B"):
            a, b = getattr(self, name), getattr(other, name)
            if len(a) != len(b) or any(not np.array_equal(x, y) for x, y in zip(a, b)):
                return False
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ("Q", "R", "P0", "xhat0")
        )


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


def _as_matrix_list(value, count_hint=None):
    value = list(value)
    return [np.atleast_2d(np.asarray(v, dtype=float)) for v in value]


def validate(candidate) -> ModelSet:
    """Validate a model-set-shaped record and return an immutable ModelSet.

    Parameters
    ----------
    candidate : ModelSet or mapping
        Either an existing ModelSet or a mapping with keys ``F``, ``H``,
        ``Q``, ``R``, ``P0``, ``gamma`` and optionally ``B`` and ``xhat0``.
        ``F`` and ``H`` are sequences of per-model matrices; scalars are
        promoted to 1x1 matrices.

    Raises
    ------
    EmptyModelSet
        If the family has no models.
    DimensionMismatch
        If any matrix shape is inconsistent.
    NotPositiveDefinite
        If Q, R, or P0 fails the symmetric factorization test.
    NonpositiveGamma
        If gamma <= 0.
    """
    if isinstance(candidate, ModelSet):
        record = {f.name: getattr(candidate, f.name) for f in fields(ModelSet)}
        record = {k: record[k] for k in ("F", "H", "B", "Q", "R", "P0", "gamma", "xhat0")}
    elif isinstance(candidate, Mapping):
        record = dict(candidate)
    else:
        raise DimensionMismatch(f"cannot interpret {type(candidate).__name__} as a model set")

    F = _as_matrix_list(record.get("F", ()))
    H = _as_matrix_list(record.get("H", ()))
    K = len(F)
    if K == 0:
        raise EmptyModelSet("model set must contain at least one model")
    if len(H) != K:
        raise DimensionMismatch(f"got {K} F matrices but {len(H)} H matrices")

    n = F[0].shape[0]
    m = H[0].shape[0]
    for i, Fi in enumerate(F):
        if Fi.shape != (n, n):
            raise DimensionMismatch(f"F[{i}] has shape {Fi.shape}, expected ({n}, {n})")
    for i, Hi in enumerate(H):
        if Hi.shape != (m, n):
            raise DimensionMismatch(f"H[{i}] has shape {Hi.shape}, expected ({m}, {n})")

    B_raw = record.get("B", None)
    if B_raw is None or (hasattr(B_raw, "__len__") and len(B_raw) == 0):
        p = 0
        B = []
    else:
        B = _as_matrix_list(B_raw)
        if len(B) != K:
            raise DimensionMismatch(f"got {K} models but {len(B)} B matrices")
        p = B[0].shape[1]
        for i, Bi in enumerate(B):
            if Bi.shape != (n, p):
                raise DimensionMismatch(f"B[{i}] has shape {Bi.shape}, expected ({n}, {p})")

    Q = check_spd(np.atleast_2d(np.asarray(record["Q"], dtype=float)), "Q")
    R = check_spd(np.atleast_2d(np.asarray(record["R"], dtype=float)), "R")
    P0 = check_spd(np.atleast_2d(np.asarray(record["P0"], dtype=float)), "P0")
    if Q.shape != (n, n):
        raise DimensionMismatch(f"Q has shape {Q.shape}, expected ({n}, {n})")
    if R.shape != (m, m):
        raise DimensionMismatch(f"R has shape {R.shape}, expected ({m}, {m})")
    if P0.shape != (n, n):
        raise DimensionMismatch(f"P0 has shape {P0.shape}, expected ({n}, {n})")

    gamma = float(record["gamma"])
    if not gamma > 0:
        raise NonpositiveGamma(f"gamma must be > 0, got {gamma}")

    xhat0 = np.asarray(record.get("xhat0", np.zeros(n)), dtype=float).reshape(-1)
    if xhat0.shape != (n,):
        raise DimensionMismatch(f"xhat0 has shape {xhat0.shape}, expected ({n},)")

    return ModelSet(
        K=K,
        n=n,
        m=m,
        p=p,
        F=tuple(_freeze(Fi) for Fi in F),
        H=tuple(_freeze(Hi) for Hi in H),
        B=tuple(_freeze(Bi) for Bi in B),
        Q=_freeze(Q),
        R=_freeze(R),
        P0=_freeze(P0),
        gamma=gamma,
        xhat0=_freeze(xhat0),
    )
