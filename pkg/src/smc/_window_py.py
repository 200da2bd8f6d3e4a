"""numpy implementation of the sliding-window feature kernel.

Produces results bit-identical to the compiled kernel in ``_window_ext.pyx``:
GLCM statistics are evaluated from integer co-occurrence counts with a single
final division, and every floating-point reduction runs in the same
sequential order as the C loops.
"""
import math
from functools import reduce

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

N_FEATURES = 7


def homogeneity_weights(levels):
    """Integer weights ``lcm(1..levels) / (1 + d)`` and their common scale.

    With these, the homogeneity numerator is an exact integer sum as long as
    it stays below 2**53. Past that the scale falls back to 1 and the weights
    to plain reciprocals.
    """
    scale = reduce(math.lcm, range(1, levels + 1), 1)
    if scale < 2**40:
        weights = np.array([scale // (1 + d) for d in range(levels)], dtype=np.float64)
        return weights, float(scale)
    return np.array([1.0 / (1 + d) for d in range(levels)]), 1.0


def features_from_counts(counts, levels):
    """GLCM statistics for a stack of count matrices, shape (n, L, L) int64.

    Returns an (4, n) float array: contrast, homogeneity, energy, correlation.
    Windows with no pairs must be filtered out by the caller.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.shape[0]
    idx = np.arange(levels, dtype=np.int64)
    diff = idx[:, None] - idx[None, :]
    total = counts.sum(axis=(1, 2))
    totf = total.astype(np.float64)

    contrast = (counts * (diff * diff)).sum(axis=(1, 2)).astype(np.float64) / totf

    weights, scale = homogeneity_weights(levels)
    absdiff = np.abs(diff)
    by_diff = np.zeros((n, levels), dtype=np.int64)
    for d in range(levels):
        by_diff[:, d] = counts[:, absdiff == d].sum(axis=1)
    hom_num = np.zeros(n)
    for d in range(levels):
        hom_num = hom_num + by_diff[:, d].astype(np.float64) * weights[d]
    homogeneity = hom_num / (scale * totf)

    energy = (counts * counts).sum(axis=(1, 2)).astype(np.float64) / (totf * totf)

    rows = counts.sum(axis=2)
    cols = counts.sum(axis=1)
    s1 = rows @ idx
    s2 = rows @ (idx * idx)
    t1 = cols @ idx
    t2 = cols @ (idx * idx)
    cross = (counts * (idx[:, None] * idx[None, :])).sum(axis=(1, 2))
    var_i = total * s2 - s1 * s1
    var_j = total * t2 - t1 * t1
    num = (total * cross - s1 * t1).astype(np.float64)
    vi = var_i.astype(np.float64)
    vj = var_j.astype(np.float64)
    denom = np.where(var_i == var_j, vi, np.sqrt(vi) * np.sqrt(vj))
    degenerate = (var_i == 0) | (var_j == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(degenerate, 0.0, num / np.where(degenerate, 1.0, denom))
    corr = np.clip(corr, -1.0, 1.0)
    return np.stack([contrast, homogeneity, energy, corr])


def window_counts(quantized, size, stride, levels, offsets, symmetric=True):
    """Co-occurrence counts for every window, shape (rows*cols, L, L)."""
    q = np.ascontiguousarray(quantized, dtype=np.int64)
    wins = sliding_window_view(q, (size, size))[::stride, ::stride]
    nwin = wins.shape[0] * wins.shape[1]
    wins = wins.reshape(nwin, size, size)
    base = (np.arange(nwin, dtype=np.int64) * levels * levels)[:, None]
    flat = np.zeros(nwin * levels * levels, dtype=np.int64)
    for dy, dx in offsets:
        y0, y1 = max(0, -dy), min(size, size - dy)
        x0, x1 = max(0, -dx), min(size, size - dx)
        if y1 <= y0 or x1 <= x0:
            continue
        a = wins[:, y0:y1, x0:x1].reshape(nwin, -1)
        b = wins[:, y0 + dy:y1 + dy, x0 + dx:x1 + dx].reshape(nwin, -1)
        flat += np.bincount((base + a * levels + b).ravel(), minlength=flat.size)
        if symmetric:
            flat += np.bincount((base + b * levels + a).ravel(), minlength=flat.size)
    return flat.reshape(nwin, levels, levels)


def window_moments(raw, size, stride):
    """(3, n) array of sigma, skew, excess kurtosis for each window."""
    r = np.ascontiguousarray(raw, dtype=np.float64)
    wins = sliding_window_view(r, (size, size))[::stride, ::stride]
    nwin = wins.shape[0] * wins.shape[1]
    return moments_of_rows(wins.reshape(nwin, size * size))


def moments_of_rows(cols):
    """Moments of each row of an (n, npx) array, summed left to right."""
    nwin, npx = cols.shape
    acc = np.zeros(nwin)
    for k in range(npx):
        acc = acc + cols[:, k]
    mean = acc / float(npx)
    m2 = np.zeros(nwin)
    m3 = np.zeros(nwin)
    m4 = np.zeros(nwin)
    for k in range(npx):
        d = cols[:, k] - mean
        d2 = d * d
        m2 = m2 + d2
        m3 = m3 + d2 * d
        m4 = m4 + d2 * d2
    var = m2 / float(npx)
    sigma = np.sqrt(var)
    # a spread whose square underflows is treated like a constant row
    flat = (cols.max(axis=1) == cols.min(axis=1)) | (var * var == 0.0)
    safe_var = np.where(flat, 1.0, var)
    skew = np.where(flat, 0.0, (m3 / float(npx)) / (safe_var * np.where(flat, 1.0, sigma)))
    kurt = np.where(flat, 0.0, (m4 / float(npx)) / (safe_var * safe_var) - 3.0)
    sigma = np.where(flat, 0.0, sigma)
    return np.stack([sigma, skew, kurt])


def window_features(quantized, raw, size, stride, levels, offsets):
    """All seven features per window, shape (7, rows*cols).

    Returns ``None`` in place of the array when some window has no
    co-occurring pair (only possible for degenerate offsets).
    """
    counts = window_counts(quantized, size, stride, levels, offsets)
    if counts.shape[0] and np.any(counts.sum(axis=(1, 2)) == 0):
        return None
    out = np.empty((N_FEATURES, counts.shape[0]))
    if counts.shape[0] == 0:
        return out
    out[:4] = features_from_counts(counts, levels)
    out[4:] = window_moments(raw, size, stride)
    return out
