import numpy as np
import pytest
from hypothesis import given, strategies as st

from smc import reduce
from smc.errors import DegenerateClass, InvalidInput, IoError

from oracles import lda_oracle


def _instance(seed, n_per=(8, 9, 10), d=5):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.standard_normal((m, d)) + rng.standard_normal(d) * 2 for m in n_per])
    y = np.repeat(np.arange(len(n_per)), n_per)
    return X, y


def _cos_dist(a, b):
    return 1.0 - abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))


@pytest.mark.parametrize("seed", range(10))
def test_lda_matches_generalized_eigensolver(seed):
    X, y = _instance(seed)
    m = reduce.lda_fit(X, y)
    vals, vecs = lda_oracle(X, y, reduce.DEFAULT_RIDGE)
    assert np.allclose(m.eigenvalues, vals[:2], rtol=0, atol=1e-8)
    for k in range(2):
        assert _cos_dist(m.basis[:, k], vecs[:, k]) < 1e-6


def test_lda_scaling_and_signs():
    X, y = _instance(3)
    m = reduce.lda_fit(X, y)
    sw, _ = reduce.scatter_matrices(X, y)
    d = X.shape[1]
    sw_reg = sw + reduce.DEFAULT_RIDGE * np.trace(sw) / d * np.eye(d)
    assert np.allclose(m.basis.T @ sw_reg @ m.basis, (X.shape[0] - 3) * np.eye(2), atol=1e-8)
    for k in range(2):
        col = m.basis[:, k]
        assert col[np.argmax(np.abs(col))] > 0
    assert m.eigenvalues[0] >= m.eigenvalues[1]


def test_lda_separates_in_projection():
    X, y = _instance(1)
    Z = reduce.transform(reduce.lda_fit(X, y), X)
    assert Z.shape == (X.shape[0], 2)
    means = np.array([Z[y == c].mean(axis=0) for c in range(3)])
    assert np.all(np.abs(means - means.mean(axis=0)).sum(axis=1) > 0)


def test_lda_high_dimensional_needs_ridge():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((12, 40))
    y = np.repeat([0, 1, 2], 4)
    m = reduce.lda_fit(X, y)
    assert np.all(np.isfinite(m.basis))
    with pytest.raises(InvalidInput):
        reduce.lda_fit(X, y, ridge=0.0)


def test_lda_errors():
    X, y = _instance(0)
    with pytest.raises(DegenerateClass):
        reduce.lda_fit(X[:9], np.r_[np.zeros(8, int), 1])
    with pytest.raises(InvalidInput):
        reduce.lda_fit(X, np.zeros(len(X), int))
    with pytest.raises(InvalidInput):
        reduce.lda_fit(X, y, k=3)
    with pytest.raises(InvalidInput):
        reduce.lda_fit(X, y, ridge=-1.0)


def test_pca_matches_covariance_eigendecomposition():
    X, _ = _instance(2)
    m = reduce.pca_fit(X, 2)
    cov = np.cov(X, rowvar=False)
    w, v = np.linalg.eigh(cov)
    assert np.allclose(m.eigenvalues, w[::-1][:2], rtol=1e-10)
    for k in range(2):
        assert _cos_dist(m.basis[:, k], v[:, ::-1][:, k]) < 1e-10
    with pytest.raises(InvalidInput):
        reduce.pca_fit(X, 0)


@given(st.integers(0, 10_000))
def test_transform_is_affine(seed):
    X, y = _instance(seed)
    m = reduce.lda_fit(X, y)
    a, b = X[0], X[1]
    za, zb = reduce.transform(m, np.vstack([a, b]))
    zmid = reduce.transform(m, (a + b) / 2)[0]
    assert np.allclose(zmid, (za + zb) / 2, atol=1e-9)


def test_model_round_trip(tmp_path):
    X, y = _instance(4)
    m = reduce.lda_fit(X, y)
    m.save(tmp_path / "m.json")
    back = reduce.ProjectionModel.load(tmp_path / "m.json")
    assert np.array_equal(back.basis, m.basis) and np.array_equal(back.mean, m.mean)
    assert back.kind == "LDA" and back.config == {"ridge": reduce.DEFAULT_RIDGE, "k": 2}
    assert np.array_equal(reduce.transform(back, X), reduce.transform(m, X))
    with pytest.raises(IoError):
        m.save(tmp_path / "missing" / "m.json")
    with pytest.raises(InvalidInput):
        reduce.transform(m, X[:, :3])


def test_lda_deterministic():
    X, y = _instance(5)
    a, b = reduce.lda_fit(X, y), reduce.lda_fit(X.copy(), y.copy())
    assert np.array_equal(a.basis, b.basis)
