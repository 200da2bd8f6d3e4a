"""Robust multi-view k-means.

Minimizes sum_v alpha_v^gamma * sum_i ||x_i^(v) - f^(v)_{g_i}||_2 over a
shared hard assignment g, per-view centroids F^(v) and view weights alpha on
the simplex, by block-coordinate descent:

* centroids: one reweighted-mean step per view, sample weights
  1 / (2 * max(residual, eps)), i.e. F = X D G (G' D G)^-1;
* assignment: each sample goes to the cluster with the smallest
  alpha-weighted sum of per-view residual norms;
* weights: alpha_v proportional to H_v^(1 / (1 - gamma)), H_v the view's
  summed residual norm.

Each block step cannot increase the objective, so the trace is monotone.
"""
import numpy as np

from ..errors import InvalidInput
from ._common import ClusterAssignment
from .kmeans import kmeans

EPS = 1e-10


def standardize(X, mode="dimension"):
    """Put a view on a common scale.

    ``"dimension"``: zero mean, unit variance per column (constant columns
    only centred). ``"view"``: centre, then divide the whole view by one
    scalar so the mean per-column variance is 1; the view's internal
    geometry is kept. ``"none"``: unchanged.
    """
    if mode == "none":
        return X
    mu = X.mean(axis=0)
    if mode == "dimension":
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        return (X - mu) / sd
    if mode == "view":
        scale = np.sqrt((X.var(axis=0)).mean())
        return (X - mu) / (scale if scale > 0 else 1.0)
    raise InvalidInput(f"unknown standardization mode {mode!r}")


def _residuals(X, F, labels):
    return np.sqrt(((X - F[labels]) ** 2).sum(axis=1))


def _view_weights(H, gamma):
    H = np.asarray(H, dtype=np.float64)
    zero = H == 0
    if zero.any():
        return zero / zero.sum()
    w = H ** (1.0 / (1.0 - gamma))
    return w / w.sum()


def _objective(H, alpha, gamma):
    return float(((alpha ** gamma) * H).sum())


def _reweighted_centroids(X, labels, F, K):
    r = _residuals(X, F, labels)
    d = 1.0 / (2.0 * np.maximum(r, EPS))
    num = np.zeros((K, X.shape[1]))
    np.add.at(num, labels, d[:, None] * X)
    den = np.bincount(labels, weights=d, minlength=K)
    out = F.copy()
    ok = den > 0
    out[ok] = num[ok] / den[ok, None]
    return out


def rmkmc(views, K, gamma=2.0, seed=0, max_iter=100, tol=1e-9, standardize_views="view",
          n_init=10):
    """Consensus clustering over ``views`` (list of n x d_v arrays).

    Returns a ClusterAssignment whose ``info`` holds the final ``alpha``, the
    per-iteration ``alpha_trace`` and per-view residuals ``H``.
    """
    if isinstance(views, dict):
        views = list(views.values())
    views = [np.asarray(v, dtype=np.float64) for v in views]
    if not views:
        raise InvalidInput("need at least one view")
    views = [v.reshape(-1, 1) if v.ndim == 1 else v for v in views]
    n = views[0].shape[0]
    if any(v.shape[0] != n for v in views):
        raise InvalidInput("all views must have the same number of rows")
    if gamma <= 1:
        raise InvalidInput(f"gamma must be > 1, got {gamma}")
    if int(K) != K or not 1 <= K <= n:
        raise InvalidInput(f"K must be in [1, {n}], got {K}")
    K = int(K)
    if standardize_views is True:
        standardize_views = "dimension"
    elif standardize_views is False or standardize_views is None:
        standardize_views = "none"
    views = [standardize(v, standardize_views) for v in views]
    M = len(views)

    init = kmeans(np.hstack(views), K, seed=seed, n_init=n_init)
    labels = init.labels.copy()
    alpha = np.full(M, 1.0 / M)
    F = []
    for X in views:
        c = np.zeros((K, X.shape[1]))
        np.add.at(c, labels, X)
        F.append(c / np.bincount(labels, minlength=K)[:, None])
    H = np.array([_residuals(X, f, labels).sum() for X, f in zip(views, F)])
    trace = [_objective(H, alpha, gamma)]
    alpha_trace = [alpha.copy()]

    for _ in range(max_iter):
        scale = alpha ** gamma
        # centroid block; keep the old centroids if rounding would raise the cost
        for v, X in enumerate(views):
            cand = _reweighted_centroids(X, labels, F[v], K)
            if _residuals(X, cand, labels).sum() <= _residuals(X, F[v], labels).sum():
                F[v] = cand

        # assignment block
        cost = np.zeros((n, K))
        for v, X in enumerate(views):
            diff = X[:, None, :] - F[v][None, :, :]
            cost += scale[v] * np.sqrt(np.einsum("ikd,ikd->ik", diff, diff))
        new_labels = np.argmin(cost, axis=1)
        counts = np.bincount(new_labels, minlength=K)
        for k in np.flatnonzero(counts == 0):
            # move the worst-fit sample out of a non-singleton cluster
            own = cost[np.arange(n), new_labels].copy()
            own[np.bincount(new_labels, minlength=K)[new_labels] <= 1] = -1.0
            p = int(np.argmax(own))
            new_labels[p] = k
            for v, X in enumerate(views):
                F[v][k] = X[p]

        H = np.array([_residuals(X, f, new_labels).sum() for X, f in zip(views, F)])
        alpha = _view_weights(H, gamma)
        trace.append(_objective(H, alpha, gamma))
        alpha_trace.append(alpha.copy())
        changed = not np.array_equal(new_labels, labels)
        labels = new_labels
        if not changed and trace[-2] - trace[-1] <= tol * max(trace[-1], 1e-300):
            break

    return ClusterAssignment(
        labels, K, trace, seed,
        {"alpha": alpha, "alpha_trace": np.array(alpha_trace), "H": H, "gamma": gamma},
    )
