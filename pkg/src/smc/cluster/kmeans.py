"""Lloyd's k-means with k-means++ seeding."""
import numpy as np

from ._common import ClusterAssignment, check_data, sq_dists


def kmeans_plusplus(X, K, rng, dist2=None):
    """Indices of K seeds; each next seed drawn with probability ~ D(x)^2.

    ``dist2`` may supply a precomputed n x n squared-distance matrix.
    """
    n = X.shape[0] if X is not None else dist2.shape[0]
    first = int(rng.integers(n))
    chosen = [first]
    closest = dist2[first].copy() if dist2 is not None else sq_dists(X, X[[first]])[:, 0]
    for _ in range(1, K):
        total = closest.sum()
        if total > 0:
            probs = closest / total
            nxt = int(rng.choice(n, p=probs))
        else:
            # all remaining points coincide with a seed
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(free[rng.integers(free.size)])
        chosen.append(nxt)
        d_new = dist2[nxt] if dist2 is not None else sq_dists(X, X[[nxt]])[:, 0]
        closest = np.minimum(closest, d_new)
    return np.array(chosen)


def _repair_empty(X, labels, centers, K):
    """Give each empty cluster the point currently farthest from its centre."""
    for k in range(K):
        counts = np.bincount(labels, minlength=K)
        if counts[k]:
            continue
        resid = ((X - centers[labels]) ** 2).sum(axis=1)
        resid[counts[labels] <= 1] = -1.0
        p = int(np.argmax(resid))
        labels[p] = k
        centers[k] = X[p]
    return labels


def _update_centers(X, labels, K):
    centers = np.zeros((K, X.shape[1]))
    np.add.at(centers, labels, X)
    return centers / np.bincount(labels, minlength=K)[:, None]


def sse(X, labels, centers):
    return float(((X - centers[labels]) ** 2).sum())


def _lloyd(X, K, centers, max_iter):
    labels = np.argmin(sq_dists(X, centers), axis=1)
    labels = _repair_empty(X, labels, centers, K)
    centers = _update_centers(X, labels, K)
    trace = [sse(X, labels, centers)]
    for _ in range(max_iter):
        new = np.argmin(sq_dists(X, centers), axis=1)
        new = _repair_empty(X, new, centers, K)
        if np.array_equal(new, labels):
            break
        labels = new
        centers = _update_centers(X, labels, K)
        trace.append(sse(X, labels, centers))
    return labels, centers, trace


def kmeans(X, K, seed=0, n_init=10, max_iter=300):
    """Best of ``n_init`` k-means++ / Lloyd runs by within-cluster sum of squares.

    ``objective_trace`` is the SSE after each centre update of the winning run.
    """
    X, K = check_data(X, K)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, n_init)):
        seeds = kmeans_plusplus(X, K, rng)
        labels, centers, trace = _lloyd(X, K, X[seeds].copy(), max_iter)
        if best is None or trace[-1] < best[2][-1]:
            best = (labels, centers, trace)
    labels, centers, trace = best
    return ClusterAssignment(labels, K, trace, seed, {"centers": centers})
