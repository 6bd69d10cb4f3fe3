import math

import numpy as np
import pytest

import exarray


def test_constant_sample():
    y, types = exarray.sample({"family": "constant", "value": 1}, 4, seed=7)
    assert types is None
    assert y.shape == (4, 4)
    assert np.all(y == 1)


def test_sampling_is_deterministic_and_nested():
    cfg = {"family": "graphon", "grid": [[0.2, 0.6], [0.6, 0.9]], "weakly_exchangeable": True, "zero_diagonal": True}
    a, _ = exarray.sample(cfg, 30, seed=3)
    b, _ = exarray.sample(cfg, 10, seed=3)
    assert np.array_equal(a[:10, :10], b)
    assert np.array_equal(a, a.T)


def test_counterexample_types():
    g, xi = exarray.sample({"family": "counterexample"}, 20, seed=1)
    assert xi.shape == (20,)
    assert np.all(np.diag(g) == 0)


def test_identity_measure():
    mu = exarray.subarray_measure(np.eye(3), 1)
    assert mu[((1,),)] == pytest.approx(1 / 3)
    assert mu[((0,),)] == pytest.approx(2 / 3)
    mc = exarray.subarray_measure(np.eye(3), 1, mode="mc", draws=50000, seed=2)
    assert abs(mc[((1,),)] - 1 / 3) < 4 * math.sqrt(2 / 9 / 50000)


def test_budget_error():
    with pytest.raises(exarray.BudgetExceeded):
        exarray.subarray_measure(np.zeros((200, 200)), 3)
    with pytest.raises(ValueError):
        exarray.subarray_measure(np.zeros((2, 3)), 1)


def test_graph_density():
    edge = np.array([[0, 1], [1, 0]])
    path = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert exarray.graph_ind(edge, path) == 4
    assert exarray.graph_density(edge, path) == pytest.approx(2 / 3)
    assert exarray.falling_factorial(10, 3) == 720


def test_simulate_and_jumps():
    rng = np.random.default_rng(0)
    init = rng.integers(0, 2, size=(30, 30))
    kernel = {"family": "clocks", "lambda_global": 0.2, "lambda_row": 0.1, "lambda_col": 0.1, "lambda_entry": 0.001}
    traj = exarray.simulate(kernel, init, 20.0, seed=4)
    assert traj.continuous
    assert traj.states.shape == (len(traj), 30, 30)
    report = exarray.jumps(traj)
    assert report["agreement"] >= 0.99
    assert traj.to_jsonl().count("\n") >= len(traj)


def test_hidden_majority_frozen_with_type_zero():
    g, _ = exarray.sample({"family": "counterexample"}, 8, seed=5)
    traj = exarray.simulate(
        {"family": "hidden_majority"}, g, 5, seed=1, symmetric=True, zero_diagonal=True, types=[0] * 8
    )
    assert all(np.array_equal(s, g) for s in traj.states)


def test_markov_test():
    r = exarray.markov_test(50, 20, 100000, seed=1)
    assert abs(r["one_step"] - 21 / 32) <= r["one_step_halfwidth"]
    assert r["history_closed_form"] == pytest.approx(0.9958346, abs=1e-6)


def test_locality_and_dispersion():
    x = np.zeros((5, 5))
    alt = np.ones((5, 5))
    alt[:2, :2] = 0
    r = exarray.locality_test({"family": "iid_refresh", "law": {"bernoulli": 0.5}}, 2, x, alt, 1, 4000, seed=2)
    assert r["tv"] <= r["noise_band"]
    rows = np.zeros((20, 20))
    rows[:10] = 1
    d = exarray.dispersion_test(rows, B=200, seed=1)
    assert d["statistic"] > d["band"]
