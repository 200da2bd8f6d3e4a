from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInput


@dataclass
class ClusterAssignment:
    """Cluster index per sample plus per-iteration diagnostics."""

    labels: np.ndarray
    K: int
    objective_trace: list[float] = field(default_factory=list)
    seed: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else float("nan")

    def diagnostics(self) -> dict:
        out = {"K": self.K, "seed": self.seed, "objective_trace": list(self.objective_trace)}
        for key, val in self.info.items():
            out[key] = val.tolist() if isinstance(val, np.ndarray) else val
        return out


def check_data(X, K):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidInput("X must be a non-empty n x d matrix")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("X contains non-finite values")
    if int(K) != K or K < 1:
        raise InvalidInput(f"K must be a positive integer, got {K}")
    if K > X.shape[0]:
        raise InvalidInput(f"K={K} exceeds sample count {X.shape[0]}")
    return X, int(K)


def sq_dists(X, C):
    """Squared Euclidean distances, shape (n, k).

    Differences are formed explicitly; the dot-product expansion loses
    precision far from the origin.
    """
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("ikd,ikd->ik", diff, diff)


def relabel_by_appearance(labels):
    """Renumber clusters 0..K-1 in order of first occurrence."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    mapping = np.empty(labels.max() + 1, dtype=np.int64)
    mapping[np.unique(labels)[order]] = np.arange(order.size)
    return mapping[labels]
