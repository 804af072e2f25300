import numpy as np
import pytest

import mmxest as mx
from mmxest import bayes, filter_bank
from conftest import make_random_models

I1 = np.eye(1)


def opposite_sign_bank():
    # Two scalar models that differ only in output sign, centered away
    # from zero so the measurement can discriminate between them.
    return mx.validate({
        "F": [I1, I1],
        "H": [I1, -I1],
        "Q": I1, "R": I1, "P0": I1,
        "gamma": 5.0,
        "xhat0": np.array([0.5]),
    })


def test_bayes_init_uniform(paper_models):
    post = bayes.bayes_init(paper_models)
    np.testing.assert_allclose(post.mu, [0.5, 0.5])


def test_bayes_init_explicit_prior(paper_models):
    post = bayes.bayes_init(paper_models, prior=[0.9, 0.1])
    np.testing.assert_allclose(post.mu, [0.9, 0.1])
    with pytest.raises(ValueError):
        bayes.bayes_init(paper_models, prior=[0.9, 0.2])
    with pytest.raises(ValueError):
        bayes.bayes_init(paper_models, prior=[1.1, -0.1])


def test_bayes_step_two_model_oracle():
    # Predictions +-0.5, S = 2 for both; y = 0.5 gives innovations 0 and 1,
    # so mu_0' = 1 / (1 + exp(-1/4)).
    models = opposite_sign_bank()
    state = filter_bank.init(models, mx.run_recursion(models, 2))
    post = bayes.bayes_init(models)
    post = bayes.bayes_step(post, state, np.array([0.5]))
    expected = 1.0 / (1.0 + np.exp(-0.25))
    assert post.mu[0] == pytest.approx(expected, abs=1e-12)
    assert post.mu.sum() == pytest.approx(1.0, abs=1e-12)


def test_bayes_step_keeps_probability_vector(paper_models):
    rng = np.random.default_rng(6)
    state = filter_bank.init(paper_models, mx.run_recursion(paper_models, 25))
    post = bayes.bayes_init(paper_models)
    for t in range(25):
        y = rng.normal(size=1) * 3.0
        post = bayes.bayes_step(post, state, y)
        assert post.mu.min() >= 0
        assert post.mu.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.isfinite(post.mu).all()
        state = filter_bank.step(state, y, rng.normal(size=1))


def test_bayes_step_survives_huge_innovation():
    models = opposite_sign_bank()
    state = filter_bank.init(models, mx.run_recursion(models, 2))
    post = bayes.bayes_init(models)
    post = bayes.bayes_step(post, state, np.array([1e6]))
    assert np.isfinite(post.mu).all()
    assert post.mu.sum() == pytest.approx(1.0, abs=1e-12)
    assert post.mu.min() > 0  # floored, never exactly zero


def test_bayes_estimate_average_and_map():
    models = opposite_sign_bank()
    state = filter_bank.init(models, mx.run_recursion(models, 2))
    post = bayes.BayesPosterior(mu=np.array([0.75, 0.25]))
    avg = bayes.bayes_estimate(post, state, mode="average")
    assert avg[0] == pytest.approx(0.75 * 0.5 + 0.25 * (-0.5), abs=1e-12)
    top = bayes.bayes_estimate(post, state, mode="map")
    assert top[0] == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        bayes.bayes_estimate(post, state, mode="median")


def test_bayes_estimate_map_tie_breaks_low_index():
    models = opposite_sign_bank()
    state = filter_bank.init(models, mx.run_recursion(models, 2))
    post = bayes.BayesPosterior(mu=np.array([0.5, 0.5]))
    top = bayes.bayes_estimate(post, state, mode="map")
    assert top[0] == pytest.approx(0.5, abs=1e-12)


def test_posterior_concentrates_on_truth():
    rng = np.random.default_rng(10)
    models = make_random_models(rng, K=2, n=2, m=1)
    # Model 0 drives the data; the posterior should favor it.
    N = 40
    x = models.xhat0.copy()
    state = filter_bank.init(models, mx.run_recursion(models, N))
    post = bayes.bayes_init(models)
    for _ in range(N):
        y = models.H[0] @ x + 0.1 * rng.normal(size=1)
        post = bayes.bayes_step(post, state, y)
        state = filter_bank.step(state, y)
        x = models.F[0] @ x + 0.1 * rng.normal(size=2)
    assert post.mu[0] > 0.9
