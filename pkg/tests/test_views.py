import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from smc import _backend, views
from smc.errors import EmptyGlcm, InvalidInput
from smc.imaging import GrayImage
from smc.views import QuantizedImage, WindowConfig

from oracles import glcm_bruteforce, glcm_features_exact


def _check_against_oracle(window, levels=16, offsets=views.DEFAULT_OFFSETS):
    q = QuantizedImage(np.asarray(window), levels)
    g = views.glcm(q, offsets)
    counts = glcm_bruteforce(np.asarray(window).tolist(), levels, offsets)
    assert g.counts.tolist() == counts
    c, h, e, r = views.glcm_features(g)
    oc, oh, oe, ocorr = glcm_features_exact(counts)
    assert c == float(oc) and h == float(oh) and e == float(oe)
    if ocorr is None:
        assert r == 0.0
    else:
        num, prod = ocorr
        assert r == pytest.approx(float(num) / math.sqrt(float(prod)), abs=4e-16)
        if math.isqrt(prod.numerator) ** 2 == prod.numerator and \
                math.isqrt(prod.denominator) ** 2 == prod.denominator:
            exact = num / Fraction(math.isqrt(prod.numerator), math.isqrt(prod.denominator))
            assert r == float(exact)


def test_hand_window():
    w = QuantizedImage(np.array([[0, 1], [1, 0]]), 2)
    for offsets in ([(0, 1)], [(0, 1), (1, 0)]):
        assert views.glcm_features(views.glcm(w, offsets)) == (1.0, 0.5, 0.5, -1.0)
    # diagonals pair equal values, so the four-offset pool is less contrasted
    # counts [[2, 4], [4, 2]] over 12 pairs
    assert views.glcm_features(views.glcm(w)) == (2 / 3, 2 / 3, 10 / 36, -1 / 3)


def test_single_offset_counts():
    q = QuantizedImage(np.array([[0, 0, 1], [1, 2, 2]]), 3)
    g = views.glcm(q, [(0, 1)], symmetric=False)
    assert g.counts.tolist() == [[1, 1, 0], [0, 0, 1], [0, 0, 1]]


@given(arrays(np.int64, st.tuples(st.integers(1, 7), st.integers(1, 7)),
              elements=st.integers(0, 15)))
def test_glcm_matches_bruteforce(window):
    if window.shape == (1, 1):
        with pytest.raises(EmptyGlcm):
            views.glcm(QuantizedImage(window, 16))
        return
    _check_against_oracle(window)


@given(arrays(np.int64, st.tuples(st.integers(2, 7), st.integers(2, 7)), elements=st.integers(0, 15)))
def test_glcm_is_symmetric_and_normalized(window):
    g = views.glcm(QuantizedImage(window, 16))
    assert np.array_equal(g.counts, g.counts.T)
    assert g.p.sum() == pytest.approx(1.0)
    c, h, e, r = views.glcm_features(g)
    assert c >= 0 and 0 < h <= 1 and 0 < e <= 1 and -1 <= r <= 1


def test_constant_window_features():
    g = views.glcm(QuantizedImage(np.full((7, 7), 5), 16))
    assert views.glcm_features(g) == (0.0, 1.0, 1.0, 0.0)


def test_float_path_agrees_with_count_path(rng):
    w = rng.integers(0, 16, (7, 7))
    g = views.glcm(QuantizedImage(w, 16))
    fp = views.glcm_features(views.Glcm.from_probabilities(g.p))
    assert np.allclose(fp, views.glcm_features(g), atol=1e-12)


def test_quantize_levels():
    q = views.quantize(GrayImage(np.array([[0.0, 0.0624, 0.0625, 0.999, 1.0]])), 16)
    assert q.data.tolist() == [[0, 0, 1, 15, 15]]


def test_moment_features():
    assert views.moment_features(np.full(9, 0.3)) == (0.0, 0.0, 0.0)
    s, sk, ku = views.moment_features(np.array([0.0, 1.0]))
    assert (s, sk, ku) == (0.5, 0.0, -2.0)
    x = np.array([0.1, 0.2, 0.2, 0.9])
    m = x.mean()
    sd = math.sqrt(((x - m) ** 2).mean())
    ref = (sd, ((x - m) ** 3).mean() / sd**3, ((x - m) ** 4).mean() / sd**4 - 3)
    assert np.allclose(views.moment_features(x), ref, rtol=1e-12)


def test_tiny_spread_counts_as_flat():
    a = np.zeros((7, 7))
    a[0, 0] = 5e-324
    out = views.extract_views(GrayImage(a), backend="python")
    assert (out["sigma"][0], out["skew"][0], out["kurtosis"][0]) == (0.0, 0.0, 0.0)


def test_window_grid():
    assert views.window_grid(32, 32, 7) == (26, 26)
    assert views.window_grid(10, 8, 7, 2) == (1, 2)
    assert views.window_grid(5, 8, 7) == (0, 0)


def test_extract_views_shape_and_order(rng):
    img = GrayImage(rng.random((12, 10)))
    out = views.extract_views(img)
    assert list(out) == list(views.VIEW_NAMES)
    assert all(v.shape == (6 * 4,) for v in out.values())
    # first entry is the top-left window, computed directly
    win = views.quantize(GrayImage(img.data[:7, :7]))
    assert out["contrast"][0] == views.glcm_features(views.glcm(win))[0]
    assert out["sigma"][0] == views.moment_features(img.data[:7, :7])[0]
    # row-major: second entry is the window shifted one column right
    win2 = views.quantize(GrayImage(img.data[:7, 1:8]))
    assert out["energy"][1] == views.glcm_features(views.glcm(win2))[2]


def test_extract_rejects_small_image():
    with pytest.raises(InvalidInput):
        views.extract_views(GrayImage(np.zeros((5, 9))))


def test_single_pixel_window_has_no_pairs():
    with pytest.raises(EmptyGlcm):
        views.extract_views(GrayImage(np.zeros((3, 3))), WindowConfig(size=1))


@pytest.mark.skipif("compiled" not in _backend.BACKENDS, reason="extension not built")
@given(arrays(np.float64, st.tuples(st.integers(7, 16), st.integers(7, 16)), elements=st.floats(0, 1)),
       st.integers(1, 3), st.sampled_from([4, 16]))
def test_backends_bit_identical(a, stride, levels):
    img = GrayImage(a)
    cfg = WindowConfig(stride=stride, levels=levels)
    py = views.extract_views(img, cfg, backend="python")
    cc = views.extract_views(img, cfg, backend="compiled")
    for name in views.VIEW_NAMES:
        assert np.array_equal(py[name], cc[name]), name


def test_unknown_backend():
    with pytest.raises(InvalidInput):
        views.extract_views(GrayImage(np.zeros((7, 7))), backend="gpu")


def test_build_dataset_resamples_and_labels(rng):
    imgs = [GrayImage(rng.random((10, 10))), GrayImage(rng.random((12, 11)))]
    ds = views.build_dataset(imgs, [0, 1], sample_ids=["a", "b"])
    assert ds.n == 2 and ds.M == 7
    assert ds.dims()["contrast"] == 16
    assert ds.config["image_size"] == [10, 10]
    with pytest.raises(InvalidInput):
        views.build_dataset(imgs, [0])


def test_dataset_validation():
    with pytest.raises(InvalidInput):
        views.MultiViewDataset({"a": np.zeros((3, 2)), "b": np.zeros((4, 2))})
    with pytest.raises(InvalidInput):
        views.MultiViewDataset({"a": np.zeros((3, 2))}, labels=np.array([0, 2, 2]))
    ds = views.MultiViewDataset({"a": np.arange(6.0).reshape(3, 2)}, np.array([0, 1, 0]))
    sub = ds.subset([2, 0])
    assert sub.sample_ids == ["s0002", "s0000"] and sub.labels.tolist() == [0, 0]


def test_unsymmetrized_horizontal_pairs():
    g = views.glcm(QuantizedImage(np.array([[0, 1], [1, 0]]), 2), [(0, 1)], symmetric=False)
    assert g.p.tolist() == [[0.0, 0.5], [0.5, 0.0]]


def test_uniform_two_level_glcm():
    g = views.Glcm.from_counts(np.ones((2, 2), dtype=np.int64))
    assert views.glcm_features(g) == (0.5, 0.75, 0.25, 0.0)
    assert views.glcm_features(views.Glcm.from_probabilities(np.full((2, 2), 0.25))) == \
        (0.5, 0.75, 0.25, 0.0)
