"""Supervised (LDA) and unsupervised (PCA) linear projections."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DegenerateClass, InvalidInput, IoError

DEFAULT_RIDGE = 1e-6


@dataclass(frozen=True, eq=False)
class ProjectionModel:
    """Fitted affine projection ``(X - mean) @ basis``.

    ``eigenvalues`` are the generalized eigenvalues for LDA and the explained
    variances for PCA, in the same (descending) order as the basis columns.
    """

    kind: str
    mean: np.ndarray
    basis: np.ndarray
    class_count: int = 0
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))
    config: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    def to_dict(self) -> dict:
        # json writes floats with repr(), which round-trips exactly
        return {
            "kind": self.kind,
            "k": self.k,
            "class_count": self.class_count,
            "mean": self.mean.tolist(),
            "basis": self.basis.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ProjectionModel:
        basis = np.asarray(d["basis"], dtype=np.float64)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        return cls(d["kind"], np.asarray(d["mean"], dtype=np.float64), basis,
                   int(d.get("class_count", 0)),
                   np.asarray(d.get("eigenvalues", []), dtype=np.float64),
                   dict(d.get("config", {})))

    def save(self, path) -> None:
        try:
            with open(path, "w") as fh:
                json.dump(self.to_dict(), fh)
        except OSError as exc:
            raise IoError(f"cannot write model {path}: {exc}") from exc

    @classmethod
    def load(cls, path) -> ProjectionModel:
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except OSError as exc:
            raise IoError(f"cannot read model {path}: {exc}") from exc


def _fix_signs(vectors):
    """Flip each column so its largest-magnitude coordinate is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _order(values, vectors):
    """Descending by value; exact ties broken by the first differing coordinate."""
    keys = [vectors[i] for i in range(vectors.shape[0] - 1, -1, -1)] + [-values]
    order = np.lexsort(keys)
    return values[order], vectors[:, order]


def scatter_matrices(X, y):
    """Within-class and between-class scatter of ``X`` (n x d) under labels ``y``."""
    X = np.asarray(X, dtype=np.float64)
    classes = np.unique(y)
    mean = X.mean(axis=0)
    d = X.shape[1]
    sw = np.zeros((d, d))
    sb = np.zeros((d, d))
    for c in classes:
        xc = X[y == c]
        mc = xc.mean(axis=0)
        centered = xc - mc
        sw += centered.T @ centered
        diff = (mc - mean)[:, None]
        sb += xc.shape[0] * (diff @ diff.T)
    return sw, sb


def lda_fit(X, y, k: int | None = None, ridge: float = DEFAULT_RIDGE) -> ProjectionModel:
    """Fisher LDA with the within-class scatter shrunk by ``ridge * trace(Sw)/d``.

    Directions solve ``Sb w = lambda (Sw + ridge*tau*I) w`` and are scaled to
    unit pooled within-class variance, ``w' (Sw + ridge*tau*I) w = n - C``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise InvalidInput("X must be n x d and y must have n labels")
    if ridge < 0:
        raise InvalidInput("ridge must be >= 0")
    classes, counts = np.unique(y, return_counts=True)
    C = classes.size
    if C < 2:
        raise InvalidInput("LDA needs at least two classes")
    if np.any(counts < 2):
        bad = classes[counts < 2].tolist()
        raise DegenerateClass(f"classes {bad} have fewer than 2 samples")
    if k is None:
        k = C - 1
    if not 1 <= k <= C - 1:
        raise InvalidInput(f"k must be in [1, {C - 1}], got {k}")

    d = X.shape[1]
    sw, sb = scatter_matrices(X, y)
    tau = np.trace(sw) / d
    if tau == 0:
        tau = 1.0
    sw_reg = sw + (ridge * tau) * np.eye(d)
    try:
        chol = linalg.cholesky(sw_reg, lower=True)
    except linalg.LinAlgError:
        raise InvalidInput("within-class scatter is singular; use ridge > 0") from None
    # whiten: Sb -> L^-1 Sb L^-T, a symmetric eigenproblem
    tmp = linalg.solve_triangular(chol, sb, lower=True)
    m = linalg.solve_triangular(chol, tmp.T, lower=True)
    m = (m + m.T) / 2.0
    vals, vecs = linalg.eigh(m, subset_by_index=(d - k, d - 1))
    basis = linalg.solve_triangular(chol.T, vecs, lower=False)
    basis = _fix_signs(basis * np.sqrt(max(X.shape[0] - C, 1)))
    vals, basis = _order(vals, basis)
    return ProjectionModel("LDA", X.mean(axis=0), basis, int(C), vals,
                           {"ridge": ridge, "k": k})


def pca_fit(X, k: int) -> ProjectionModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidInput("X must be n x d")
    n, d = X.shape
    if n < 2:
        raise InvalidInput("PCA needs at least two samples")
    if not 1 <= k <= min(n - 1, d):
        raise InvalidInput(f"k must be in [1, {min(n - 1, d)}], got {k}")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    basis = _fix_signs(vt[:k].T)
    var = s[:k] ** 2 / (n - 1)
    var, basis = _order(var, basis)
    return ProjectionModel("PCA", mean, basis, 0, var, {"k": k})


def transform(model: ProjectionModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.d:
        raise InvalidInput(f"expected {model.d} columns, got {X.shape[1]}")
    return (X - model.mean) @ model.basis
