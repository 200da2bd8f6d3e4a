"""Seven texture views per image from a sliding window.

Each window position yields four GLCM statistics (contrast, homogeneity,
energy, correlation) on the quantized window and three moments (sigma, skew,
excess kurtosis) on the raw intensities. Concatenating one statistic over all
window positions, in row-major order, gives that statistic's view vector.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend, _window_py
from .errors import EmptyGlcm, InvalidInput
from .imaging import GrayImage, resize_nearest

log = logging.getLogger(__name__)

VIEW_NAMES = ("contrast", "homogeneity", "energy", "correlation", "sigma", "skew", "kurtosis")
DEFAULT_OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))


@dataclass(frozen=True)
class WindowConfig:
    size: int = 7
    stride: int = 1
    levels: int = 16
    offsets: tuple[tuple[int, int], ...] = DEFAULT_OFFSETS

    def __post_init__(self):
        if self.size < 1 or self.stride < 1:
            raise InvalidInput("window size and stride must be >= 1")
        if self.levels < 2:
            raise InvalidInput("levels must be >= 2")
        offs = tuple((int(dy), int(dx)) for dy, dx in self.offsets)
        if not offs:
            raise InvalidInput("at least one GLCM offset is required")
        object.__setattr__(self, "offsets", offs)

    def to_dict(self):
        return {"size": self.size, "stride": self.stride, "levels": self.levels,
                "offsets": [list(o) for o in self.offsets]}

    @classmethod
    def from_dict(cls, d):
        d = dict(d or {})
        if "offsets" in d:
            d["offsets"] = tuple(tuple(o) for o in d["offsets"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class QuantizedImage:
    data: np.ndarray
    levels: int = 16

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if self.levels < 2:
            raise InvalidInput("levels must be >= 2")
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidInput("QuantizedImage needs a non-empty 2-D array")
        if arr.min() < 0 or arr.max() >= self.levels:
            raise InvalidInput(f"bins must lie in [0, {self.levels - 1}]")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class Glcm:
    """Normalized co-occurrence matrix.

    ``counts`` holds the integer pair counts when the matrix came from
    :func:`glcm`; statistics are then evaluated exactly from counts.
    """

    levels: int
    p: np.ndarray
    counts: np.ndarray | None = None

    @classmethod
    def from_counts(cls, counts):
        counts = np.asarray(counts, dtype=np.int64)
        total = counts.sum()
        if total == 0:
            raise EmptyGlcm("no co-occurring pairs")
        return cls(counts.shape[0], counts / float(total), counts)

    @classmethod
    def from_probabilities(cls, p):
        p = np.asarray(p, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise InvalidInput("GLCM must be square")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise InvalidInput("GLCM entries must be >= 0 and sum to 1")
        return cls(p.shape[0], p, None)


@dataclass
class FeatureView:
    name: str
    matrix: np.ndarray


@dataclass
class MultiViewDataset:
    """n samples over M named views, with optional class labels."""

    views: dict[str, np.ndarray]
    labels: np.ndarray | None = None
    sample_ids: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.views:
            raise InvalidInput("dataset needs at least one view")
        self.views = {k: np.asarray(v, dtype=np.float64) for k, v in self.views.items()}
        sizes = {v.shape[0] for v in self.views.values()}
        if len(sizes) != 1 or any(v.ndim != 2 for v in self.views.values()):
            raise InvalidInput("every view must be a 2-D matrix with the same row count")
        n = sizes.pop()
        if not self.sample_ids:
            self.sample_ids = [f"s{i:04d}" for i in range(n)]
        if len(self.sample_ids) != n:
            raise InvalidInput("sample_ids length does not match view rows")
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (n,) or not np.issubdtype(labels.dtype, np.integer):
                raise InvalidInput("labels must be n integers")
            if labels.min() < 0:
                raise InvalidInput("labels must be non-negative")
            present = np.unique(labels)
            if not np.array_equal(present, np.arange(labels.max() + 1)):
                raise InvalidInput("every class in [0, C-1] needs at least one sample")
            self.labels = labels.astype(np.int64)

    @property
    def n(self) -> int:
        return next(iter(self.views.values())).shape[0]

    @property
    def M(self) -> int:
        return len(self.views)

    @property
    def names(self) -> list[str]:
        return list(self.views)

    @property
    def class_count(self) -> int:
        return 0 if self.labels is None else int(self.labels.max()) + 1

    def dims(self) -> dict[str, int]:
        return {k: v.shape[1] for k, v in self.views.items()}

    def subset(self, idx) -> MultiViewDataset:
        idx = np.asarray(idx)
        return MultiViewDataset(
            {k: v[idx] for k, v in self.views.items()},
            None if self.labels is None else self.labels[idx],
            [self.sample_ids[i] for i in idx],
            dict(self.config),
        )


def quantize(img: GrayImage, levels: int = 16) -> QuantizedImage:
    if levels < 2:
        raise InvalidInput(f"levels must be >= 2, got {levels}")
    bins = np.floor(img.data * levels).astype(np.int64)
    return QuantizedImage(np.minimum(bins, levels - 1), levels)


def window_grid(width: int, height: int, size: int, stride: int = 1) -> tuple[int, int]:
    if size < 1 or stride < 1:
        raise InvalidInput("size and stride must be >= 1")
    if width < size or height < size:
        return (0, 0)
    return ((height - size) // stride + 1, (width - size) // stride + 1)


def glcm(window: QuantizedImage, offsets: Sequence[tuple[int, int]] = DEFAULT_OFFSETS,
         symmetric: bool = True) -> Glcm:
    """Pool co-occurrence counts over ``offsets`` for one window.

    Pairs ``(v[y, x], v[y+dy, x+dx])`` are counted wherever both pixels are
    inside the window; ``symmetric`` also counts each pair reversed.
    """
    if not offsets:
        raise InvalidInput("offsets must be non-empty")
    h, w = window.data.shape
    counts = np.zeros((window.levels, window.levels), dtype=np.int64)
    q = window.data
    for dy, dx in offsets:
        y0, y1 = max(0, -dy), min(h, h - dy)
        x0, x1 = max(0, -dx), min(w, w - dx)
        if y1 <= y0 or x1 <= x0:
            continue
        a = q[y0:y1, x0:x1].ravel()
        b = q[y0 + dy:y1 + dy, x0 + dx:x1 + dx].ravel()
        np.add.at(counts, (a, b), 1)
        if symmetric:
            np.add.at(counts, (b, a), 1)
    return Glcm.from_counts(counts)


def glcm_features(g: Glcm) -> tuple[float, float, float, float]:
    """(contrast, homogeneity, energy, correlation); correlation is 0 when a
    marginal has zero variance."""
    if g.counts is not None:
        return tuple(float(v) for v in _window_py.features_from_counts(g.counts[None], g.levels)[:, 0])
    p = g.p
    i = np.arange(g.levels, dtype=np.float64)
    diff = i[:, None] - i[None, :]
    contrast = float(np.sum(diff * diff * p))
    homogeneity = float(np.sum(p / (1.0 + np.abs(diff))))
    energy = float(np.sum(p * p))
    pi = p.sum(axis=1)
    pj = p.sum(axis=0)
    mu_i = float(i @ pi)
    mu_j = float(i @ pj)
    sd_i = np.sqrt(float(((i - mu_i) ** 2) @ pi))
    sd_j = np.sqrt(float(((i - mu_j) ** 2) @ pj))
    if sd_i * sd_j == 0:
        corr = 0.0
    else:
        corr = float(np.sum(np.outer(i - mu_i, i - mu_j) * p) / (sd_i * sd_j))
        corr = min(1.0, max(-1.0, corr))
    return contrast, homogeneity, energy, corr


def moment_features(window) -> tuple[float, float, float]:
    """Population sigma, skew and excess kurtosis; (0, 0, 0) for a flat window."""
    data = window.data if isinstance(window, GrayImage) else np.asarray(window, dtype=np.float64)
    if data.size == 0:
        raise InvalidInput("empty window")
    out = _window_py.moments_of_rows(data.reshape(1, -1))
    return tuple(float(v) for v in out[:, 0])


def extract_views(img: GrayImage, config: WindowConfig | None = None,
                  backend: str | None = None) -> dict[str, np.ndarray]:
    """Seven feature vectors of length rows*cols, keyed by view name."""
    config = config or WindowConfig()
    rows, cols = window_grid(img.width, img.height, config.size, config.stride)
    if rows == 0:
        raise InvalidInput(
            f"image {img.width}x{img.height} is smaller than the {config.size}x{config.size} window"
        )
    q = quantize(img, config.levels)
    out = _backend.window_features(q.data, img.data, config.size, config.stride,
                                   config.levels, config.offsets, backend=backend)
    if out is None:
        raise EmptyGlcm("a window has no in-bounds pair for the configured offsets")
    flat_windows = int(np.count_nonzero(out[4] == 0.0))
    if flat_windows:
        log.debug("%d flat windows: skew/kurtosis set to 0", flat_windows)
    return {name: out[k] for k, name in enumerate(VIEW_NAMES)}


def build_dataset(images: Sequence[GrayImage], labels=None, config: WindowConfig | None = None,
                  sample_ids: Sequence[str] | None = None, backend: str | None = None) -> MultiViewDataset:
    """Stack per-image view vectors into an n x d matrix per view.

    Images of different sizes are resampled (nearest neighbour) to the
    smallest height and width found in the corpus.
    """
    if len(images) == 0:
        raise InvalidInput("empty corpus")
    if labels is not None and len(labels) != len(images):
        raise InvalidInput(f"{len(labels)} labels for {len(images)} images")
    config = config or WindowConfig()
    h = min(im.height for im in images)
    w = min(im.width for im in images)
    rows = {name: [] for name in VIEW_NAMES}
    for im in images:
        vecs = extract_views(resize_nearest(im, h, w), config, backend=backend)
        for name in VIEW_NAMES:
            rows[name].append(vecs[name])
    views = {name: np.vstack(rows[name]) for name in VIEW_NAMES}
    return MultiViewDataset(
        views,
        None if labels is None else np.asarray(labels, dtype=np.int64),
        list(sample_ids) if sample_ids is not None else [],
        {"window": config.to_dict(), "image_size": [h, w]},
    )
