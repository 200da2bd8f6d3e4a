"""Independent reference implementations used only by the tests.

Everything here is written directly from the definitions, with exact
rational arithmetic where it matters, and shares no code with the package.
"""
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np


def pair_counts(y_true, y_pred):
    """(a, fp, fn, b) by enumerating every unordered pair."""
    a = fp = fn = b = 0
    for i, j in combinations(range(len(y_true)), 2):
        st = y_true[i] == y_true[j]
        sp = y_pred[i] == y_pred[j]
        if st and sp:
            a += 1
        elif sp:
            fp += 1
        elif st:
            fn += 1
        else:
            b += 1
    return a, fp, fn, b


def acc_bruteforce(y_true, y_pred):
    """Best one-to-one cluster->class matching by trying every injection."""
    classes = sorted(set(y_true))
    clusters = sorted(set(y_pred))
    best = 0
    if len(clusters) <= len(classes):
        for perm in permutations(classes, len(clusters)):
            m = dict(zip(clusters, perm))
            best = max(best, sum(m[p] == t for t, p in zip(y_true, y_pred)))
    else:
        for perm in permutations(clusters, len(classes)):
            m = dict(zip(perm, classes))
            best = max(best, sum(m.get(p) == t for t, p in zip(y_true, y_pred)))
    return Fraction(best, len(y_true))


def rand_exact(y_true, y_pred):
    a, fp, fn, b = pair_counts(y_true, y_pred)
    return Fraction(a + b, a + fp + fn + b)


def fmi_squared_exact(y_true, y_pred):
    """FMI^2 as a Fraction (FMI itself is a square root)."""
    a, fp, fn, _ = pair_counts(y_true, y_pred)
    if a == 0:
        return Fraction(0)
    return Fraction(a * a, (a + fp) * (a + fn))


def ari_exact(y_true, y_pred):
    """ARI = (RI - E[RI]) / (max RI - E[RI]) under the permutation model."""
    a, fp, fn, b = pair_counts(y_true, y_pred)
    n2 = a + fp + fn + b
    st, sp = a + fn, a + fp
    expected = Fraction(st * sp, n2)
    maximum = Fraction(st + sp, 2)
    if maximum == expected:
        return Fraction(1)
    return (a - expected) / (maximum - expected)


def set_partitions(n):
    """All partitions of range(n) as restricted-growth label lists."""
    if n == 0:
        yield []
        return

    def rec(prefix, m):
        if len(prefix) == n:
            yield list(prefix)
            return
        for k in range(m + 1):
            prefix.append(k)
            yield from rec(prefix, max(m, k + 1))
            prefix.pop()

    yield from rec([0], 1)


def glcm_bruteforce(window, levels, offsets):
    """Symmetric pooled co-occurrence counts by visiting every pixel pair."""
    h, w = len(window), len(window[0])
    counts = [[0] * levels for _ in range(levels)]
    for dy, dx in offsets:
        for y in range(h):
            for x in range(w):
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w:
                    i, j = window[y][x], window[yy][xx]
                    counts[i][j] += 1
                    counts[j][i] += 1
    return counts


def glcm_features_exact(counts):
    """(contrast, homogeneity, energy, correlation) as Fractions.

    Correlation needs a square root, so it is returned as
    (numerator, variance product) with corr = num / sqrt(prod), or None
    when a marginal is constant.
    """
    L = len(counts)
    total = sum(map(sum, counts))
    p = [[Fraction(counts[i][j], total) for j in range(L)] for i in range(L)]
    contrast = sum(p[i][j] * (i - j) ** 2 for i in range(L) for j in range(L))
    homog = sum(p[i][j] / (1 + abs(i - j)) for i in range(L) for j in range(L))
    energy = sum(p[i][j] ** 2 for i in range(L) for j in range(L))
    pi = [sum(p[i]) for i in range(L)]
    pj = [sum(p[i][j] for i in range(L)) for j in range(L)]
    mi = sum(i * pi[i] for i in range(L))
    mj = sum(j * pj[j] for j in range(L))
    vi = sum((i - mi) ** 2 * pi[i] for i in range(L))
    vj = sum((j - mj) ** 2 * pj[j] for j in range(L))
    cov = sum((i - mi) * (j - mj) * p[i][j] for i in range(L) for j in range(L))
    corr = None if vi == 0 or vj == 0 else (cov, vi * vj)
    return contrast, homog, energy, corr


def lda_oracle(X, y, ridge):
    """Dense generalized symmetric eigenproblem Sb w = lambda (Sw + ridge*tau*I) w."""
    from scipy.linalg import eig

    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    d = X.shape[1]
    Sw = np.zeros((d, d))
    Sb = np.zeros((d, d))
    for c in np.unique(y):
        Xc = X[y == c]
        mc = Xc.mean(axis=0)
        Sw += (Xc - mc).T @ (Xc - mc)
        Sb += len(Xc) * np.outer(mc - mean, mc - mean)
    Sw_reg = Sw + ridge * np.trace(Sw) / d * np.eye(d)
    vals, vecs = eig(Sb, Sw_reg)
    order = np.argsort(-vals.real)
    return vals.real[order], vecs.real[:, order]
