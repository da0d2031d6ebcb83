import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from swarm_gass.errors import ConfigError, InvalidArgument, InvalidState
from swarm_gass.search import (
    AdamState, Optimizer, OptimizerConfig, ScoredSample, SearchDistribution, adam_step,
    cem_update, es_gradient, es_update, estimate_variance_2x2, gass_update,
    positive_rank_shape, rank_shape, sample_population, schedule,
)
from swarm_gass.search.cem import elite_count
from swarm_gass.search.shaping import _ranks

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


# ---- distribution and sampling ----

def test_distribution_validates():
    with pytest.raises(InvalidArgument):
        SearchDistribution([0.0, 1.0], [1.0])
    with pytest.raises(InvalidArgument):
        SearchDistribution([0.0], [0.0])


def test_natural_params_roundtrip():
    d = SearchDistribution([1.0, -2.0], [0.5, 3.0])
    back = SearchDistribution.from_natural(*d.natural_params())
    np.testing.assert_allclose(back.mean, d.mean, rtol=1e-14)
    np.testing.assert_allclose(back.stddev, d.stddev, rtol=1e-14)


def test_sample_vanishing_variance():
    d = SearchDistribution([1.0, 2.0], [1e-12, 1e-12])
    pop = sample_population(d, 3, seed=0)
    assert pop.shape == (3, 2)
    assert np.all(np.abs(pop - [1.0, 2.0]) < 1e-9)


def test_sample_determinism():
    d = SearchDistribution([0.0, 1.0, 2.0], [1.0, 0.5, 2.0])
    a = sample_population(d, 5, seed=42)
    b = sample_population(d, 5, seed=42)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, sample_population(d, 5, seed=43))


def test_sample_moments_large_n():
    d = SearchDistribution([0.0], [1.0])
    # one stream per vector, so draw the 1e6 scalars as 1000 vectors of 1000
    # coordinates from an equivalent isotropic distribution instead
    wide = SearchDistribution.isotropic(np.zeros(1000), 1.0)
    pop = sample_population(wide, 1000, seed=7).ravel()
    assert abs(pop.mean()) < 0.01
    assert abs(pop.std() - 1.0) < 0.01
    assert sample_population(d, 2, seed=7).shape == (2, 1)


def test_sample_count_too_small():
    with pytest.raises(InvalidArgument):
        sample_population(SearchDistribution([0.0], [1.0]), 1, seed=0)


def test_antithetic_pairs():
    d = SearchDistribution.isotropic(np.zeros(4), 1.0)
    pop = sample_population(d, 6, seed=3, antithetic=True)
    np.testing.assert_array_equal(pop[1::2], -pop[0::2])


# ---- shaping ----

def test_rank_shape_examples():
    assert rank_shape([5.0, 1.0, 3.0]).tolist() == [0.5, -0.5, 0.0]
    assert rank_shape([1.0, 1.0]).tolist() == [-0.5, 0.5]
    np.testing.assert_allclose(positive_rank_shape([5.0, 1.0, 3.0]), [1.1, 0.1, 0.6], atol=1e-15)
    assert positive_rank_shape([5.0, 1.0, 3.0]).sum() == pytest.approx(1.8, abs=1e-15)


def test_rank_shape_average_ties():
    assert rank_shape([1.0, 1.0], ties="average").tolist() == [0.0, 0.0]
    np.testing.assert_allclose(rank_shape([2.0, 1.0, 2.0], ties="average"), [0.25, -0.5, 0.25])
    with pytest.raises(InvalidArgument):
        rank_shape([1.0, 2.0], ties="bogus")


@pytest.mark.parametrize("bad", [[1.0], [], [1.0, float("nan")]])
def test_rank_shape_errors(bad):
    with pytest.raises(InvalidArgument):
        rank_shape(bad)
    with pytest.raises(InvalidArgument):
        positive_rank_shape(bad)


@given(st.lists(finite, min_size=2, max_size=30))
def test_rank_shape_matches_oracle(xs):
    np.testing.assert_allclose(rank_shape(xs), oracles.centered_ranks(xs), atol=1e-15)


@given(st.lists(st.floats(-100, 100), min_size=2, max_size=30), st.floats(0.1, 10), finite)
def test_shaping_monotone_invariance(xs, a, b):
    ys = [a * x + b for x in xs]
    # rounding can merge distinct values; only compare when the order survived
    if np.any(np.sign(np.subtract.outer(xs, xs)) != np.sign(np.subtract.outer(ys, ys))):
        return
    assert rank_shape(xs).tolist() == rank_shape(ys).tolist()
    assert positive_rank_shape(xs).tolist() == positive_rank_shape(ys).tolist()


@given(st.lists(finite, min_size=2, max_size=40))
def test_positive_shape_bounds_and_order(xs):
    w = positive_rank_shape(xs)
    assert np.all(w >= 0.1 - 1e-15) and np.all(w <= 1.1 + 1e-15)
    order = np.argsort(xs, kind="stable")
    assert np.all(np.diff(w[order]) >= 0)


@given(st.lists(finite, min_size=2, max_size=40, unique=True))
def test_rank_shape_zero_sum_without_ties(xs):
    assert abs(rank_shape(xs).sum()) < 1e-12


def test_ranks_are_a_permutation():
    r = _ranks([3.0, 3.0, 1.0, 2.0])
    assert sorted(r.tolist()) == [0.0, 1.0, 2.0, 3.0]
    assert r.tolist() == [2.0, 3.0, 0.0, 1.0]


# ---- 2x2 variance ----

def test_variance_examples():
    np.testing.assert_array_equal(estimate_variance_2x2([2.5, 2.5, 2.5]), np.zeros((2, 2)))
    np.testing.assert_allclose(estimate_variance_2x2([1.0, 2.0, 3.0]),
                               oracles.variance_2x2([1.0, 2.0, 3.0]), atol=1e-12)
    np.testing.assert_allclose(estimate_variance_2x2([-1.0, 1.0]), [[2.0, 0.0], [0.0, 0.0]], atol=1e-12)


def test_variance_batched_matches_per_coordinate():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(7, 4))
    v = estimate_variance_2x2(x)
    for d in range(4):
        np.testing.assert_allclose(v[d], estimate_variance_2x2(x[:, d]), atol=1e-13)


def test_variance_needs_two():
    with pytest.raises(InvalidArgument):
        estimate_variance_2x2([1.0])


@given(arrays(np.float64, st.integers(2, 12), elements=st.floats(-10, 10)), st.floats(1e-3, 10))
def test_variance_plus_gamma_spd(x, gamma):
    v = estimate_variance_2x2(x) + gamma * np.eye(2)
    assert np.allclose(v, v.T)
    assert np.trace(v) > 0
    assert np.linalg.det(v) > -1e-9 * max(1.0, np.abs(v).max()) ** 2
    assert np.all(np.linalg.eigvalsh(v) > -1e-9 * max(1.0, np.abs(v).max()))


# ---- GASS ----

def _samples(thetas, weights, returns=None):
    if returns is None:
        returns = np.zeros(len(weights))
    return [ScoredSample(t, r, w) for t, r, w in zip(thetas, returns, weights)]


def test_gass_hand_case_matches_oracle():
    d = SearchDistribution([0.3], [0.8])
    thetas = np.array([[-0.5], [0.4], [1.2]])
    w = [0.1, 0.6, 1.1]
    got = gass_update(d, _samples(thetas, w), alpha_k=0.05, gamma=0.5)
    mu, sd = oracles.gass_step([0.3], [0.8], thetas.tolist(), w, 0.05, 0.5)
    np.testing.assert_allclose(got.mean, mu, atol=1e-10)
    np.testing.assert_allclose(got.stddev, sd, atol=1e-10)


def test_gass_small_residual_bound():
    mu = np.array([1.0, -1.0])
    sigma = np.full(2, 1e-3)
    d = SearchDistribution(mu, sigma)
    thetas = np.tile(mu, (5, 1))
    w = positive_rank_shape(np.arange(5.0))
    alpha, gamma = 0.1, 0.5
    new = gass_update(d, _samples(thetas, w), alpha, gamma)
    bound = alpha * sigma.max() ** 2 / gamma * w.sum() / w.sum()
    assert np.linalg.norm(new.mean - mu) <= bound * math.sqrt(2) + 1e-15


def test_gass_moves_toward_optimum():
    passes = 0
    for seed in range(20):
        d = SearchDistribution([0.0], [1.0])
        pop = sample_population(d, 200, seed)
        ret = -(pop[:, 0] - 3.0) ** 2
        new = gass_update(d, _samples(pop, positive_rank_shape(ret), ret), 0.1, 0.1)
        passes += new.mean[0] > 0.0
    assert passes >= 19


def test_gass_rejects_nonpositive_normalizer():
    d = SearchDistribution([0.0], [1.0])
    with pytest.raises(InvalidState):
        gass_update(d, _samples([[0.1], [0.2]], [0.5, -0.5]), 0.1, 0.1)
    with pytest.raises(InvalidArgument):
        gass_update(d, _samples([[0.1], [0.2]], [1.0, 1.0]), 0.1, 0.0)
    with pytest.raises(InvalidArgument):
        gass_update(d, _samples([[0.1, 0.2], [0.2, 0.1]], [1.0, 1.0]), 0.1, 0.1)


def test_gass_sigma_floor_on_invalid_precision():
    # a huge step drives the precision term positive
    d = SearchDistribution([0.0], [1.0])
    thetas = np.array([[-3.0], [0.0], [3.0]])
    new = gass_update(d, _samples(thetas, [1.1, 0.1, 1.1]), alpha_k=1e4, gamma=1e-3)
    assert new.stddev[0] == pytest.approx(1e-6)
    assert np.isfinite(new.mean).all()


def test_gass_first_order_is_es_step():
    rng = np.random.default_rng(5)
    gamma = 0.3
    theta = rng.normal(size=4)
    eps = rng.normal(size=(8, 4))
    w = rng.normal(size=8)
    d = SearchDistribution.isotropic(theta, gamma)
    g = gass_update(d, _samples(theta + gamma * eps, w), 0.2, gamma, first_order=True,
                    normalizer="count")
    e, _ = es_update(theta, eps, w, 0.2, gamma, use_adam=False)
    np.testing.assert_allclose(g.mean, e, atol=1e-12)


# ---- ES and ADAM ----

def test_es_examples():
    eps = np.array([[1.0, 0.0], [-1.0, 0.0]])
    theta, _ = es_update(np.zeros(2), eps, [0.5, 0.5], 1.0, 0.5, use_adam=False)
    np.testing.assert_array_equal(theta, [0.0, 0.0])
    theta, _ = es_update(np.zeros(2), eps, [0.5, -0.5], 1.0, 0.5, use_adam=False)
    np.testing.assert_allclose(theta, [1.0, 0.0], atol=1e-15)


def test_es_smoothed_gradient_example():
    theta0 = np.array([1.0, 1.0])
    opt = Optimizer(OptimizerConfig(mode="ES", gamma=0.1, fixed_sample_size=10_000), theta0, seed=0)
    pop = opt.ask()
    w = rank_shape(-np.sum(pop.thetas**2, axis=1))
    g = es_gradient(pop.eps, w, 0.1)
    cos = g @ -theta0 / (np.linalg.norm(g) * np.linalg.norm(theta0))
    assert cos >= 0.95


def test_es_errors():
    with pytest.raises(InvalidArgument):
        es_update(np.zeros(2), np.zeros((3, 2)), [1.0, 2.0], 0.1, 0.1)
    with pytest.raises(InvalidArgument):
        es_update(np.zeros(3), np.zeros((2, 2)), [1.0, 2.0], 0.1, 0.1)


def test_adam_first_step_sign():
    g = np.array([3.0, -0.5, 1e3])
    step, st_ = adam_step(g, 0.01, AdamState.zeros(3))
    np.testing.assert_allclose(step, 0.01 * np.sign(g), rtol=1e-6)
    assert st_.step_count == 1


def test_adam_zero_gradient():
    state = AdamState.zeros(2)
    for _ in range(5):
        step, state = adam_step(np.zeros(2), 0.1, state)
        assert np.all(step == 0)
    assert state.step_count == 5


def test_adam_matches_recurrence():
    grads = [[0.3, -1.0], [0.1, 2.0], [-0.4, 0.5]]
    want = oracles.adam(grads, 0.05)
    state = AdamState.zeros(2)
    for g, w in zip(grads, want):
        step, state = adam_step(np.array(g), 0.05, state)
        np.testing.assert_allclose(step, w, atol=1e-12)


def test_adam_length_mismatch():
    with pytest.raises(InvalidArgument):
        adam_step(np.zeros(3), 0.1, AdamState.zeros(2))


# ---- CEM ----

def test_cem_examples():
    d = SearchDistribution([0.0], [1.0])
    s = _samples([[0.0], [1.0], [2.0], [3.0]], np.zeros(4), [0.0, 1.0, 2.0, 3.0])
    new = cem_update(d, s, 0.5)
    assert new.mean[0] == pytest.approx(2.5)
    assert new.stddev[0] == pytest.approx(math.sqrt(0.5), abs=1e-12)
    full = cem_update(d, s, 1.0)
    assert full.mean[0] == pytest.approx(1.5)
    assert full.stddev[0] == pytest.approx(np.std([0, 1, 2, 3], ddof=1))
    same = _samples([[1.0], [1.0], [0.0]], np.zeros(3), [5.0, 5.0, 0.0])
    assert cem_update(d, same, 0.5).stddev[0] == pytest.approx(1e-6)


def test_cem_errors():
    d = SearchDistribution([0.0], [1.0])
    with pytest.raises(InvalidArgument):
        cem_update(d, _samples([[0.0], [1.0], [2.0]], np.zeros(3), [0, 1, 2]), 0.2)
    with pytest.raises(InvalidArgument):
        elite_count(10, 0.0)
    assert elite_count(50, 0.2) == 10


def test_cem_ties_by_index():
    d = SearchDistribution([0.0], [1.0])
    s = _samples([[0.0], [1.0], [2.0], [3.0]], np.zeros(4), [1.0, 1.0, 1.0, 0.0])
    new = cem_update(d, s, 0.5)
    assert new.mean[0] == pytest.approx(0.5)


# ---- schedule and config ----

def test_schedule_examples():
    cfg = OptimizerConfig(alpha0=0.1, alpha_exp=0.5, n0=10, tau=1.2, fixed_sample_size=None)
    assert schedule(1, cfg) == (0.1, 10)
    a, n = schedule(4, cfg)
    assert a == pytest.approx(0.05)
    assert n == 27
    fixed = OptimizerConfig(fixed_sample_size=300, alpha_exp=0.3)
    assert all(schedule(k, fixed)[1] == 300 for k in (1, 2, 50, 1000))


@given(st.integers(1, 500), st.floats(0.0, 0.45), st.integers(2, 50))
def test_schedule_monotone(k, a, n0):
    cfg = OptimizerConfig(alpha0=0.1, alpha_exp=a, n0=n0, tau=1.0, fixed_sample_size=None)
    a1, n1 = schedule(k, cfg)
    a2, n2 = schedule(k + 1, cfg)
    assert a2 <= a1 and n2 >= n1 >= 2


def test_config_errors():
    with pytest.raises(ConfigError) as exc:
        OptimizerConfig(alpha_exp=0.6, tau=1.0, fixed_sample_size=None)
    assert exc.value.key == "tau"
    with pytest.raises(ConfigError):
        OptimizerConfig(mode="PPO")
    with pytest.raises(ConfigError):
        OptimizerConfig(gamma=0.0)
    with pytest.raises(InvalidArgument):
        schedule(0, OptimizerConfig())


# ---- the ask/tell driver ----

@pytest.mark.parametrize("mode", ["ES", "GASS", "CEM"])
def test_optimizer_deterministic(mode):
    def run():
        opt = Optimizer(OptimizerConfig(mode=mode, fixed_sample_size=10, sigma0=0.5), np.ones(3), seed=4)
        for _ in range(5):
            pop = opt.ask()
            opt.tell(pop, -np.sum(pop.thetas**2, axis=1))
        return opt.center
    assert run().tobytes() == run().tobytes()


def test_optimizer_rejects_stale_population():
    opt = Optimizer(OptimizerConfig(fixed_sample_size=4), np.zeros(2))
    pop = opt.ask()
    opt.tell(pop, np.arange(4.0))
    with pytest.raises(InvalidArgument):
        opt.tell(pop, np.arange(4.0))
    with pytest.raises(InvalidArgument):
        opt.tell(opt.ask(), np.arange(3.0))


def test_optimizer_tied_antithetic_pair_is_stationary():
    cfg = OptimizerConfig(fixed_sample_size=2, antithetic=True)
    opt = Optimizer(cfg, np.array([0.5, -0.25]))
    report, w = opt.tell(opt.ask(), [1.0, 1.0])
    np.testing.assert_array_equal(opt.center, [0.5, -0.25])
    assert report.update_norm == 0.0


@settings(max_examples=30)
@given(st.integers(0, 2**31), st.sampled_from(["ES", "GASS", "CEM"]))
def test_adam_step_count_tracks_iterations(seed, mode):
    opt = Optimizer(OptimizerConfig(mode=mode, fixed_sample_size=6, sigma0=0.3), np.zeros(2), seed=seed)
    for k in range(3):
        pop = opt.ask()
        opt.tell(pop, pop.thetas[:, 0])
        assert opt.k == k + 1
        if mode == "ES":
            assert opt.adam.step_count == k + 1
        else:
            assert np.all(opt.stddev > 0)
