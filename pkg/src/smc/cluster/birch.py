"""BIRCH: CF-tree summarization followed by Ward clustering of the leaves."""
import math

import numpy as np

from ..errors import InvalidInput, TooFewSubclusters
from ._common import ClusterAssignment, check_data, sq_dists
from .hierarchy import agglomerative


class _CF:
    """Clustering feature: count, linear sum, squared-norm sum."""

    __slots__ = ("n", "ls", "ss", "child")

    def __init__(self, n, ls, ss, child=None):
        self.n = n
        self.ls = ls
        self.ss = ss
        self.child = child

    @classmethod
    def of_point(cls, x):
        return cls(1, x.copy(), float(x @ x))

    @property
    def centroid(self):
        return self.ls / self.n

    def absorb(self, other):
        self.n += other.n
        self.ls = self.ls + other.ls
        self.ss += other.ss

    def radius_with(self, other):
        n = self.n + other.n
        ls = self.ls + other.ls
        c = ls / n
        return np.sqrt(max((self.ss + other.ss) / n - float(c @ c), 0.0))


class _Node:
    __slots__ = ("entries", "leaf")

    def __init__(self, leaf):
        self.entries = []
        self.leaf = leaf

    def summary(self):
        ls = sum(e.ls for e in self.entries)
        return _CF(sum(e.n for e in self.entries), ls, sum(e.ss for e in self.entries), self)


class CFTree:
    def __init__(self, threshold, branching):
        if branching < 2:
            raise InvalidInput("branching factor must be >= 2")
        self.threshold = threshold
        self.branching = branching
        self.root = _Node(leaf=True)

    def insert(self, x):
        split = self._insert(self.root, _CF.of_point(x))
        if split is not None:
            new_root = _Node(leaf=False)
            new_root.entries = [n.summary() for n in split]
            self.root = new_root

    def _closest(self, node, cf):
        cents = np.array([e.centroid for e in node.entries])
        return int(np.argmin(sq_dists(cf.centroid[None], cents)[0]))

    def _insert(self, node, cf):
        if not node.entries:
            node.entries.append(cf)
            return None
        k = self._closest(node, cf)
        target = node.entries[k]
        if node.leaf:
            if target.radius_with(cf) <= self.threshold:
                target.absorb(cf)
                return None
            node.entries.append(cf)
        else:
            split = self._insert(target.child, cf)
            if split is None:
                target.absorb(cf)
                return None
            node.entries[k:k + 1] = [n.summary() for n in split]
        if len(node.entries) > self.branching:
            return self._split(node)
        return None

    def _split(self, node):
        """Seed two nodes with the farthest pair of entries; ties to lowest index."""
        cents = np.array([e.centroid for e in node.entries])
        d = sq_dists(cents, cents)
        a, b = divmod(int(np.argmax(d)), len(node.entries))
        left, right = _Node(node.leaf), _Node(node.leaf)
        for idx, e in enumerate(node.entries):
            (left if d[idx, a] <= d[idx, b] else right).entries.append(e)
        return left, right

    def leaves(self):
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.leaf:
                out.extend(node.entries)
            else:
                stack.extend(e.child for e in reversed(node.entries))
        return out


def _build(X, threshold, branching):
    tree = CFTree(threshold, branching)
    for x in X:
        tree.insert(x)
    return tree.leaves()


def _distinct_points(X):
    """The threshold-0 limit: only identical rows share a subcluster.

    Built directly because CF radii of nearly equal points underflow to 0.
    """
    uniq, inv = np.unique(X, axis=0, return_inverse=True)
    sizes = np.bincount(inv.ravel(), minlength=len(uniq))
    return [_CF(int(m), u * m, float(m * (u @ u))) for u, m in zip(uniq, sizes)]


def birch(X, K, threshold=None, branching=50):
    """CF-tree with the given subcluster radius ``threshold``, then weighted
    Ward on the leaf centroids down to K groups.

    ``threshold=None`` picks 0.1 x the RMS distance to the data centroid and
    halves it until at least K subclusters exist. An explicit threshold that
    leaves fewer than K subclusters raises TooFewSubclusters.
    """
    X, K = check_data(X, K)
    # power-of-two rescale so radii of very small or very large data neither
    # underflow nor overflow; exact, and every distance scales alike
    peak = float(np.abs(X).max())
    scale = math.ldexp(1.0, math.frexp(peak)[1]) if peak > 0.0 else 1.0
    X = X / scale
    auto = threshold is None
    if auto:
        spread = np.sqrt(((X - X.mean(axis=0)) ** 2).sum(axis=1).mean())
        threshold = 0.1 * spread
    else:
        threshold = threshold / scale
    subs = _build(X, threshold, branching) if threshold > 0.0 else _distinct_points(X)
    while len(subs) < K:
        if not auto or threshold == 0.0:
            raise TooFewSubclusters(f"{len(subs)} subclusters for K={K} at threshold {threshold * scale}")
        threshold = threshold / 2.0 if threshold > 1e-12 * spread else 0.0
        subs = _build(X, threshold, branching) if threshold > 0.0 else _distinct_points(X)
    cents = np.array([s.centroid for s in subs])
    sizes = np.array([s.n for s in subs], dtype=np.float64)
    groups = agglomerative(cents, K, weights=sizes).labels
    nearest = np.argmin(sq_dists(X, cents), axis=1)
    labels = groups[nearest]
    return ClusterAssignment(labels, K, [], None,
                             {"threshold": float(threshold) * scale, "n_subclusters": len(subs)})
