from importlib.resources import files

import numpy as np
import pytest

import mmxest as mx


@pytest.fixture(scope="session")
def paper_config_path():
    return str(files("mmxest") / "configs" / "example_paper.cfg")


@pytest.fixture(scope="session")
def paper_config(paper_config_path):
    return mx.load_config(paper_config_path)


@pytest.fixture(scope="session")
def paper_models(paper_config):
    return paper_config.models


@pytest.fixture()
def scalar_singleton():
    # One scalar model: F = H = Q = R = P0 = 1, gamma = 3.
    return mx.validate({
        "F": [np.eye(1)],
        "H": [np.eye(1)],
        "Q": np.eye(1),
        "R": np.eye(1),
        "P0": np.eye(1),
        "gamma": 3.0,
    })


def make_random_models(rng, K, n, m, gamma=None, with_input=False):
    """Random stable bank with gamma chosen comfortably feasible."""
    F = [0.9 * _random_contraction(rng, n) for _ in range(K)]
    H = [rng.normal(size=(m, n)) for _ in range(K)]
    Q = _random_spd(rng, n)
    R = _random_spd(rng, m)
    P0 = _random_spd(rng, n)
    spec = {"F": F, "H": H, "Q": Q, "R": R, "P0": P0, "gamma": 1.0,
            "xhat0": rng.normal(size=n)}
    if with_input:
        spec["B"] = [rng.normal(size=(n, 1)) for _ in range(K)]
    models = mx.validate(spec)
    if gamma is None:
        # Bound H P H^T over a long run, then double the bound.
        seq = mx.run_recursion(models, 60)
        lam = 0.0
        for i in range(K):
            for t in range(61):
                P = seq.cov(t, i)
                lam = max(lam, float(np.linalg.eigvalsh(
                    H[i] @ P @ H[i].T)[-1]))
        gamma = float(np.sqrt(2.0 * lam))
    spec["gamma"] = gamma
    return mx.validate(spec)


def _random_contraction(rng, n):
    A = rng.normal(size=(n, n))
    return A / max(1.0, float(np.max(np.abs(np.linalg.eigvals(A)))))


def _random_spd(rng, n):
    A = rng.normal(size=(n, n))
    return A @ A.T + n * np.eye(n)
