"""Normalized spectral clustering (symmetric Laplacian, row-normalized embedding)."""
import numpy as np
from scipy import linalg

from ..errors import InvalidInput
from ._common import ClusterAssignment, check_data
from .kmeans import kmeans
from .kmedoids import pairwise_distances


def rbf_affinity(X, gamma=None):
    """exp(-gamma * ||xi - xj||^2), zero diagonal.

    ``gamma=None`` uses 1 / (2 * median^2) over the distinct-pair distances.
    """
    D = pairwise_distances(X)
    if gamma is None:
        iu = np.triu_indices(X.shape[0], 1)
        pos = D[iu][D[iu] > 0]
        med = float(np.median(pos)) if pos.size else 1.0
        gamma = 1.0 / (2.0 * med * med)
    A = np.exp(-gamma * D * D)
    np.fill_diagonal(A, 0.0)
    return A, gamma


def knn_affinity(X, n_neighbors=10):
    """Symmetrized 0/1 k-nearest-neighbour graph (i~j if either lists the other)."""
    n = X.shape[0]
    m = min(n_neighbors, n - 1)
    D = pairwise_distances(X)
    np.fill_diagonal(D, np.inf)
    A = np.zeros((n, n))
    if m > 0:
        nbrs = np.argsort(D, axis=1, kind="stable")[:, :m]
        A[np.repeat(np.arange(n), m), nbrs.ravel()] = 1.0
    return np.maximum(A, A.T)


def spectral_embedding(A, K):
    """Rows of the K smallest eigenvectors of I - D^-1/2 A D^-1/2, unit-normalized."""
    deg = A.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    L = np.eye(A.shape[0]) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    L = (L + L.T) / 2.0
    vals, vecs = linalg.eigh(L, subset_by_index=(0, K - 1))
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    emb = np.divide(vecs, norms, out=np.zeros_like(vecs), where=norms > 0)
    return emb, vals


def spectral(X, K, affinity="rbf", gamma=None, n_neighbors=10, seed=0, n_init=10):
    """Cluster via k-means on the normalized spectral embedding.

    ``affinity`` is ``"rbf"``, ``"knn"`` or ``"precomputed"`` (then ``X`` is
    the n x n affinity matrix).
    """
    if affinity == "precomputed":
        A = np.asarray(X, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidInput("precomputed affinity must be square")
        if K > A.shape[0] or K < 1:
            raise InvalidInput(f"K={K} out of range")
        A = A.copy()
        np.fill_diagonal(A, 0.0)
    else:
        X, K = check_data(X, K)
        if affinity == "rbf":
            A, gamma = rbf_affinity(X, gamma)
        elif affinity == "knn":
            A = knn_affinity(X, n_neighbors)
        else:
            raise InvalidInput(f"unknown affinity {affinity!r}")
    emb, vals = spectral_embedding(A, K)
    km = kmeans(emb, K, seed=seed, n_init=n_init)
    info = {"eigenvalues": vals, "affinity": affinity}
    if affinity == "rbf":
        info["gamma"] = float(gamma)
    return ClusterAssignment(km.labels, K, km.objective_trace, seed, info)
