"""Gaussian mixture with full covariances fitted by EM."""
import numpy as np
from scipy import linalg

from ._common import ClusterAssignment, check_data
from .kmeans import kmeans

LOG_2PI = np.log(2.0 * np.pi)


def _m_step(X, resp, cov_reg):
    nk = np.maximum(resp.sum(axis=0), 10 * np.finfo(float).eps)
    weights = nk / X.shape[0]
    means = (resp.T @ X) / nk[:, None]
    d = X.shape[1]
    covs = np.empty((resp.shape[1], d, d))
    for k in range(resp.shape[1]):
        diff = X - means[k]
        # MAP update: ridge enters the scatter before dividing by the soft count
        covs[k] = ((resp[:, k, None] * diff).T @ diff + cov_reg * np.eye(d)) / nk[k]
    return weights, means, covs


def _log_joint(X, weights, means, covs):
    """log(w_k) + log N(x_i | mu_k, Sigma_k), shape (n, K)."""
    n, d = X.shape
    out = np.empty((n, weights.size))
    for k in range(weights.size):
        chol = linalg.cholesky(covs[k], lower=True)
        z = linalg.solve_triangular(chol, (X - means[k]).T, lower=True)
        logdet = 2.0 * np.log(np.diag(chol)).sum()
        out[:, k] = np.log(weights[k]) - 0.5 * (d * LOG_2PI + logdet + (z * z).sum(axis=0))
    return out


def _objective(log_joint, covs, cov_reg, n):
    """Mean negative log-likelihood plus the covariance penalty the M step
    minimizes, so EM never increases it."""
    m = log_joint.max(axis=1, keepdims=True)
    ll = (m[:, 0] + np.log(np.exp(log_joint - m).sum(axis=1))).sum()
    penalty = 0.5 * cov_reg * sum(np.trace(np.linalg.inv(c)) for c in covs)
    return float((-ll + penalty) / n)


def _e_step(log_joint):
    m = log_joint.max(axis=1, keepdims=True)
    r = np.exp(log_joint - m)
    return r / r.sum(axis=1, keepdims=True)


def gmm(X, K, seed=0, max_iter=200, tol=1e-9, cov_reg=1e-6):
    """EM from a k-means start; labels are the most responsible component.

    The trace holds the mean penalized negative log-likelihood after every
    M step. It is non-increasing.
    """
    X, K = check_data(X, K)
    n = X.shape[0]
    init = kmeans(X, K, seed=seed)
    resp = np.zeros((n, K))
    resp[np.arange(n), init.labels] = 1.0
    weights, means, covs = _m_step(X, resp, cov_reg)
    lj = _log_joint(X, weights, means, covs)
    trace = [_objective(lj, covs, cov_reg, n)]
    for _ in range(max_iter):
        resp = _e_step(lj)
        weights, means, covs = _m_step(X, resp, cov_reg)
        lj = _log_joint(X, weights, means, covs)
        trace.append(_objective(lj, covs, cov_reg, n))
        if trace[-2] - trace[-1] <= tol * max(1.0, abs(trace[-1])):
            break
    labels = np.argmax(lj, axis=1)
    return ClusterAssignment(labels, K, trace, seed,
                             {"weights": weights, "means": means, "covariances": covs})
