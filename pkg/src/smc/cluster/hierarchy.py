"""Ward agglomerative clustering via the Lance-Williams recurrence."""
import numpy as np

from ._common import ClusterAssignment, check_data, relabel_by_appearance


def ward_tree(X, weights=None):
    """Full merge sequence as a list of (i, j, cost) with i < j.

    Cluster ``i`` absorbs ``j``; costs are Ward distances (twice the
    increase in within-cluster sum of squares). Ties go to the pair
    with the smallest (i, j). ``weights`` gives the size of each
    starting cluster when the rows are centroids.
    """
    n = X.shape[0]
    size = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64).copy()
    diff = X[:, None, :] - X[None, :, :]
    dist = np.einsum("ijd,ijd->ij", diff, diff)
    if weights is not None:
        dist = dist * (2.0 * np.outer(size, size) / np.add.outer(size, size))
    dist[np.tril_indices(n)] = np.inf
    active = np.ones(n, dtype=bool)
    merges = []
    for _ in range(n - 1):
        flat = int(np.argmin(dist))
        i, j = divmod(flat, n)
        cost = float(dist[i, j])
        merges.append((i, j, cost))
        ni, nj = size[i], size[j]
        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        if others.size:
            dki = np.where(others < i, dist[others, i], dist[i, others])
            dkj = np.where(others < j, dist[others, j], dist[j, others])
            nk = size[others]
            new = ((ni + nk) * dki + (nj + nk) * dkj - nk * cost) / (ni + nj + nk)
            lo = others < i
            dist[others[lo], i] = new[lo]
            dist[i, others[~lo]] = new[~lo]
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        active[j] = False
        size[i] = ni + nj
    return merges


def cut_tree(n, merges, K):
    parent = np.arange(n)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j, _ in merges[: n - K]:
        parent[find(j)] = find(i)
    roots = np.array([find(a) for a in range(n)])
    return relabel_by_appearance(roots)


def agglomerative(X, K, linkage="ward", weights=None):
    """Bottom-up Ward merging until K clusters remain.

    The objective trace lists the merge costs actually performed.
    """
    if linkage != "ward":
        raise ValueError(f"only Ward linkage is supported, got {linkage!r}")
    X, K = check_data(X, K)
    n = X.shape[0]
    merges = ward_tree(X, weights) if n > 1 else []
    labels = cut_tree(n, merges, K)
    return ClusterAssignment(labels, K, [c for _, _, c in merges[: n - K]], None,
                             {"linkage": linkage})
