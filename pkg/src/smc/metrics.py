"""External clustering metrics: accuracy under optimal matching,
Fowlkes-Mallows, Rand and adjusted Rand.

Pair counts are exact Python integers. Every metric is evaluated so that
its result is the correctly rounded value of the exact quantity (FMI via
an integer square root).
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInput

BOUNDS = {"Acc": (0.0, 1.0), "FM": (0.0, 1.0), "RI": (0.0, 1.0), "Rand": (-1.0, 1.0)}


def _pairs(m):
    return m * (m - 1) // 2


def _sqrt_ratio(p: int, q: int) -> float:
    """Correctly rounded sqrt(p / q) for integers p >= 0, q > 0."""
    # scale so the integer root carries at least 64 significant bits
    k = max(0, 66 - (p.bit_length() - q.bit_length()) // 2)
    num = p << (2 * k)
    r = math.isqrt(num // q)
    if r * r * q == num:
        return math.ldexp(float(r), -k)
    # strictly between r and r + 1 at this scale: no rounding boundary inside;
    # int -> float rounds correctly and ldexp by a power of two is exact
    return math.ldexp(float(2 * r + 1), -(k + 1))


SMALL_N = 256  # below this, plain Python counting beats numpy call overhead


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray          # classes x clusters
    class_totals: np.ndarray
    cluster_totals: np.ndarray
    n: int
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def a(self) -> int:
        """Pairs together in both partitions."""
        return self.tp

    @property
    def b(self) -> int:
        """Pairs apart in both partitions."""
        return self.tn

    @property
    def total_pairs(self) -> int:
        return _pairs(self.n)


def contingency(y_true, y_pred) -> ContingencyTable:
    """Classes x clusters count table (rows and columns in sorted label order)."""
    if isinstance(y_true, np.ndarray):
        y_true = y_true.ravel()
    if isinstance(y_pred, np.ndarray):
        y_pred = y_pred.ravel()
    n = len(y_true)
    if len(y_pred) != n:
        raise InvalidInput(f"label lengths differ: {n} vs {len(y_pred)}")
    if n < 2:
        raise InvalidInput("need at least two samples")
    if n <= SMALL_N:
        t = y_true.tolist() if isinstance(y_true, np.ndarray) else list(y_true)
        p = y_pred.tolist() if isinstance(y_pred, np.ndarray) else list(y_pred)
        cells = Counter(zip(t, p))
        row_tot, col_tot = {}, {}
        tp = 0
        for (c, k), v in cells.items():
            row_tot[c] = row_tot.get(c, 0) + v
            col_tot[k] = col_tot.get(k, 0) + v
            tp += _pairs(v)
        classes = sorted(row_tot)
        clusters = sorted(col_tot)
        ri = {c: i for i, c in enumerate(classes)}
        ci = {k: i for i, k in enumerate(clusters)}
        counts = np.zeros((len(classes), len(clusters)), dtype=np.int64)
        for (c, k), v in cells.items():
            counts[ri[c], ci[k]] = v
        rows = [row_tot[c] for c in classes]
        cols = [col_tot[k] for k in clusters]
        same_true = sum(_pairs(v) for v in rows)
        same_pred = sum(_pairs(v) for v in cols)
        rows = np.array(rows, dtype=np.int64)
        cols = np.array(cols, dtype=np.int64)
    else:
        y_true = np.asarray(y_true).ravel()
        y_pred = np.asarray(y_pred).ravel()
        _, ti = np.unique(y_true, return_inverse=True)
        _, pi = np.unique(y_pred, return_inverse=True)
        C, K = int(ti.max()) + 1, int(pi.max()) + 1
        counts = np.bincount(ti * K + pi, minlength=C * K).reshape(C, K).astype(np.int64)
        rows = counts.sum(axis=1)
        cols = counts.sum(axis=0)
        tp = sum(_pairs(int(v)) for v in counts[counts > 1])
        same_true = sum(_pairs(int(v)) for v in rows)
        same_pred = sum(_pairs(int(v)) for v in cols)
    fp = same_pred - tp
    fn = same_true - tp
    tn = _pairs(n) - tp - fp - fn
    return ContingencyTable(counts, rows, cols, n, tp, fp, fn, tn)


def accuracy(y_true, y_pred, table: ContingencyTable | None = None) -> float:
    """Fraction of samples matched under the best one-to-one cluster->class map."""
    t = table or contingency(y_true, y_pred)
    r, c = linear_sum_assignment(t.counts, maximize=True)
    matched = int(t.counts[r, c].sum())
    return matched / t.n


def fmi(y_true, y_pred, table: ContingencyTable | None = None) -> float:
    t = table or contingency(y_true, y_pred)
    if t.tp == 0:
        return 0.0
    # sqrt(tp^2 / ((tp+fp)(tp+fn))), rounded once
    return _sqrt_ratio(t.tp * t.tp, (t.tp + t.fp) * (t.tp + t.fn))


def rand_index(y_true, y_pred, table: ContingencyTable | None = None) -> float:
    t = table or contingency(y_true, y_pred)
    return (t.a + t.b) / t.total_pairs


def ari(y_true, y_pred, table: ContingencyTable | None = None) -> float:
    """Adjusted Rand index; 1.0 when the chance-corrected denominator vanishes
    (both partitions single-cluster, or both all-singletons)."""
    t = table or contingency(y_true, y_pred)
    n2 = t.total_pairs
    st = t.tp + t.fn
    sp = t.tp + t.fp
    num = 2 * (t.tp * n2 - st * sp)
    den = (st + sp) * n2 - 2 * st * sp
    if den == 0:
        return 1.0
    return num / den


def evaluate(y_true, y_pred) -> dict[str, float]:
    """Acc, FM, RI and Rand (= ARI, the name used in the result tables)."""
    t = contingency(y_true, y_pred)
    return {
        "Acc": accuracy(None, None, t),
        "FM": fmi(None, None, t),
        "RI": rand_index(None, None, t),
        "Rand": ari(None, None, t),
    }
