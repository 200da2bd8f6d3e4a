from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput
from .seeds import derive_seed


@dataclass(frozen=True)
class SplitPlan:
    """Stratified k-fold plan: fold ``f`` labels ``train`` and holds out ``test``."""

    fold_count: int
    seed: int
    folds: tuple[tuple[np.ndarray, np.ndarray], ...]

    @property
    def labeled_fraction(self) -> float:
        return 1.0 - 1.0 / self.fold_count

    def test_sets(self):
        return [test for _, test in self.folds]

    def to_dict(self):
        return {"fold_count": self.fold_count, "seed": self.seed,
                "labeled_fraction": self.labeled_fraction,
                "test_indices": [t.tolist() for t in self.test_sets()]}


def fold_count_for(labeled_fraction=None, fold_count=None) -> int:
    """Reconcile the two ways of stating the split: 5 folds <=> 80% labeled."""
    if labeled_fraction is not None:
        lf = float(labeled_fraction)
        if not 0.0 < lf < 1.0:
            raise InvalidInput(f"labeled_fraction must be in (0, 1), got {lf}")
        implied = round(1.0 / (1.0 - lf))
        if abs((1.0 - 1.0 / implied) - lf) > 1e-9:
            raise InvalidInput(f"labeled_fraction {lf} does not correspond to a whole number of folds")
        if fold_count is not None and int(fold_count) != implied:
            raise InvalidInput(f"labeled_fraction {lf} implies {implied} folds, not {fold_count}")
        return implied
    return 5 if fold_count is None else int(fold_count)


def stratified_folds(labels, fold_count: int = 5, seed: int = 0) -> SplitPlan:
    """Shuffle each class, then deal its samples round-robin into folds.

    The dealing position carries over from one class to the next, so fold
    sizes differ by at most one overall and by at most one per class.
    """
    labels = np.asarray(labels)
    if fold_count < 2:
        raise InvalidInput("fold_count must be >= 2")
    classes, counts = np.unique(labels, return_counts=True)
    if np.any(counts < fold_count):
        small = classes[counts < fold_count].tolist()
        raise InvalidInput(f"classes {small} have fewer than {fold_count} samples")
    assign = np.empty(labels.size, dtype=np.int64)
    pos = 0
    for c in classes:
        idx = np.flatnonzero(labels == c)
        rng = np.random.default_rng(derive_seed(seed, "folds", int(c)))
        idx = idx[rng.permutation(idx.size)]
        assign[idx] = (pos + np.arange(idx.size)) % fold_count
        pos = (pos + idx.size) % fold_count
    folds = []
    for f in range(fold_count):
        test = np.flatnonzero(assign == f)
        train = np.flatnonzero(assign != f)
        folds.append((train, test))
    return SplitPlan(fold_count, seed, tuple(folds))
