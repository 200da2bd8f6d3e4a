import numpy as np
import pytest
from hypothesis import given, strategies as st

from smc import cluster, metrics
from smc.cluster.rmkmc import standardize
from smc.errors import InvalidInput


def signal_and_noise(seed, n_per=30, d=4):
    rng = np.random.default_rng(seed)
    y = np.repeat(np.arange(3), n_per)
    centers = rng.standard_normal((3, d)) * 6
    signal = centers[y] + rng.standard_normal((y.size, d))
    noise = rng.standard_normal((y.size, d))
    return [signal, noise], y


def random_views(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(12, 40))
    return [rng.standard_normal((n, int(rng.integers(1, 5)))) * rng.uniform(0.1, 10)
            for _ in range(int(rng.integers(1, 4)))]


def objective(views, labels, F, alpha, gamma):
    total = 0.0
    for X, f, a in zip(views, F, alpha):
        total += a ** gamma * np.linalg.norm(X - f[labels], axis=1).sum()
    return total


@given(st.integers(0, 100_000))
def test_trace_monotone_and_alpha_on_simplex(seed):
    res = cluster.rmkmc(random_views(seed), 3, seed=seed)
    tr = np.array(res.objective_trace)
    assert np.all(np.diff(tr) <= 1e-9)
    at = res.info["alpha_trace"]
    assert np.allclose(at.sum(axis=1), 1.0) and np.all(at >= 0)
    assert res.labels.min() >= 0 and res.labels.max() < 3


def test_single_view_alpha_is_one(rng):
    res = cluster.rmkmc([rng.standard_normal((30, 3))], 3)
    assert np.all(res.info["alpha_trace"] == 1.0)


def test_duplicated_views_uniform_alpha_and_same_labels(rng):
    X = rng.standard_normal((45, 3))
    single = cluster.rmkmc([X], 3, seed=4)
    for M in (2, 3, 5):
        res = cluster.rmkmc([X] * M, 3, seed=4)
        assert np.allclose(res.info["alpha"], 1.0 / M, atol=1e-6)
        assert metrics.ari(single.labels, res.labels) == 1.0


def test_noise_view_downweighted():
    wins = 0
    for seed in range(20):
        views, _ = signal_and_noise(seed)
        res = cluster.rmkmc(views, 3, seed=seed)
        wins += res.info["alpha"][0] > res.info["alpha"][1]
    assert wins >= 18


def test_recovers_separable_signal():
    views, y = signal_and_noise(0)
    assert metrics.accuracy(y, cluster.rmkmc(views, 3).labels) == 1.0


def test_reported_objective_matches_definition():
    views, _ = signal_and_noise(5)
    res = cluster.rmkmc(views, 3, standardize_views="none")
    F = [np.array([X[res.labels == k].mean(axis=0) for k in range(3)]) for X in views]
    # centroids in the trace are L2,1-optimal, so the plain means cannot beat them
    assert res.objective <= objective(views, res.labels, F, res.info["alpha"], 2.0) + 1e-9


def test_alpha_closed_form():
    views, _ = signal_and_noise(2)
    res = cluster.rmkmc(views, 3, gamma=3.0)
    H = res.info["H"]
    w = H ** (1.0 / (1.0 - 3.0))
    assert np.allclose(res.info["alpha"], w / w.sum())


def test_errors(rng):
    with pytest.raises(InvalidInput):
        cluster.rmkmc([rng.random((5, 2)), rng.random((6, 2))], 2)
    with pytest.raises(InvalidInput):
        cluster.rmkmc([rng.random((5, 2))], 2, gamma=1.0)
    with pytest.raises(InvalidInput):
        cluster.rmkmc([], 2)
    with pytest.raises(InvalidInput):
        cluster.rmkmc([rng.random((5, 2))], 2, standardize_views="rank")


def test_deterministic(rng):
    views = [rng.standard_normal((30, 2)), rng.standard_normal((30, 3))]
    a = cluster.rmkmc(views, 3, seed=9)
    b = cluster.rmkmc([v.copy() for v in views], 3, seed=9)
    assert np.array_equal(a.labels, b.labels)
    assert a.objective_trace == b.objective_trace


def test_standardize_modes(rng):
    X = rng.standard_normal((50, 3)) * [1.0, 10.0, 100.0] + 7
    d = standardize(X, "dimension")
    assert np.allclose(d.mean(0), 0) and np.allclose(d.std(0), 1)
    v = standardize(X, "view")
    assert np.allclose(v.mean(0), 0) and np.isclose(v.var(0).mean(), 1)
    # one scalar for the whole view keeps column ratios
    assert np.allclose(v.std(0) / v.std(0)[0], X.std(0) / X.std(0)[0])
    assert standardize(X, "none") is X
