"""Alternating k-medoids on Euclidean distances."""
import numpy as np

from ._common import ClusterAssignment, check_data
from .kmeans import kmeans_plusplus


def pairwise_distances(X):
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.einsum("ijd,ijd->ij", diff, diff))


def _run(D, medoids, K, max_iter):
    trace = []
    labels = np.argmin(D[:, medoids], axis=1)
    for _ in range(max_iter):
        new_medoids = medoids.copy()
        for k in range(K):
            members = np.flatnonzero(labels == k)
            if members.size == 0:
                continue
            cost = D[np.ix_(members, members)].sum(axis=1)
            new_medoids[k] = members[int(np.argmin(cost))]
        labels = np.argmin(D[:, new_medoids], axis=1)
        trace.append(float(D[np.arange(D.shape[0]), new_medoids[labels]].sum()))
        if np.array_equal(new_medoids, medoids):
            break
        medoids = new_medoids
    return labels, medoids, trace


def kmedoids(X, K, seed=0, n_init=10, max_iter=300):
    """Medoid update / reassignment until the medoid set is fixed.

    Seeds come from k-means++ sampling on the distance matrix; the run with
    the smallest total distance to medoids wins.
    """
    X, K = check_data(X, K)
    D = pairwise_distances(X)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, n_init)):
        medoids = kmeans_plusplus(None, K, rng, dist2=D * D)
        labels, medoids, trace = _run(D, medoids, K, max_iter)
        if best is None or trace[-1] < best[2][-1]:
            best = (labels, medoids, trace)
    labels, medoids, trace = best
    return ClusterAssignment(labels, K, trace, seed, {"medoids": medoids})
