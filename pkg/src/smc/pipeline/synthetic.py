"""Synthetic three-class phantom corpus.

Every image is a smooth background blob plus a central textured patch. The
patch texture is Gaussian-smoothed noise, a fixed template field mixed with
per-image noise (``individuality`` sets the per-image share); its amplitude,
smoothing width and brightness gradient depend on the class. ``texture_contrast``
scales how far the class parameters spread around their mean, and 0 makes
all classes identical. Per-image nuisance (blob position and amplitude,
global brightness) adds class-independent variance.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage

from ..errors import InvalidInput
from ..imaging import GrayImage
from .seeds import derive_seed


@dataclass(frozen=True)
class SyntheticSpec:
    n_per_class: int = 50
    image_size: int = 32
    noise_std: tuple[float, ...] = (0.03, 0.06, 0.09)
    correlation: tuple[float, ...] = (1.6, 1.3, 1.0)
    gradient: tuple[float, ...] = (0.0, 0.05, 0.1)
    texture_contrast: float = 1.0
    nuisance: float = 1.0
    individuality: float = 0.3
    patch_fraction: float = 0.6
    seed: int = 0

    def __post_init__(self):
        if self.n_per_class < 1:
            raise InvalidInput("n_per_class must be >= 1")
        if self.image_size < 7:
            raise InvalidInput("image_size must be >= 7")
        if not 0.0 <= self.individuality <= 1.0:
            raise InvalidInput("individuality must be in [0, 1]")
        lens = {len(self.noise_std), len(self.correlation), len(self.gradient)}
        if len(lens) != 1:
            raise InvalidInput("per-class parameter tuples must have equal length")
        if lens.pop() < 2:
            raise InvalidInput("need at least two classes")
        for name in ("noise_std", "correlation", "gradient"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @property
    def class_count(self) -> int:
        return len(self.noise_std)

    def class_params(self, c: int) -> dict[str, float]:
        """Parameters of class ``c`` after applying ``texture_contrast``."""
        out = {}
        for name in ("noise_std", "correlation", "gradient"):
            vals = np.asarray(getattr(self, name))
            mid = vals.mean()
            out[name] = float(mid + self.texture_contrast * (vals[c] - mid))
        return out

    def to_dict(self):
        d = asdict(self)
        for k in ("noise_std", "correlation", "gradient"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in dict(d).items()})


def _phantom(rng, size, params, spec, template):
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    c = (size - 1) / 2.0
    jitter = spec.nuisance * size * 0.12
    cy, cx = c + rng.uniform(-jitter, jitter, 2)
    amp = 0.35 + 0.15 * spec.nuisance * rng.uniform(-1.0, 1.0)
    width = size * (0.35 + 0.1 * spec.nuisance * rng.uniform(-1.0, 1.0))
    blob = amp * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2.0 * width**2))
    base = 0.2 + 0.08 * spec.nuisance * rng.uniform(-1.0, 1.0)

    half = max(4, int(round(size * spec.patch_fraction / 2.0)))
    y0, y1 = max(0, int(c) - half + 1), min(size, int(c) + half + 1)
    x0, x1 = y0, y1
    s = spec.individuality
    noise = np.sqrt(1.0 - s * s) * template + s * rng.standard_normal((size, size))
    if params["correlation"] > 0:
        noise = ndimage.gaussian_filter(noise, params["correlation"], mode="reflect")
    sd = noise.std()
    if sd > 0:
        noise = noise / sd
    texture = np.zeros((size, size))
    texture[y0:y1, x0:x1] = params["noise_std"] * noise[y0:y1, x0:x1]
    angle = rng.uniform(0.0, 2.0 * np.pi)
    ramp = (np.cos(angle) * (xx - c) + np.sin(angle) * (yy - c)) / size
    texture[y0:y1, x0:x1] += params["gradient"] * ramp[y0:y1, x0:x1]
    return np.clip(base + blob + texture, 0.0, 1.0)


def generate_synthetic_corpus(spec: SyntheticSpec | None = None):
    """Return ``(images, labels)``; class blocks in order 0, 1, 2, ..."""
    spec = spec or SyntheticSpec()
    images, labels = [], []
    # texture shared by every image; individuality mixes in per-image noise
    template = np.random.default_rng(derive_seed(spec.seed, "template")).standard_normal(
        (spec.image_size, spec.image_size))
    for c in range(spec.class_count):
        params = spec.class_params(c)
        for i in range(spec.n_per_class):
            rng = np.random.default_rng(derive_seed(spec.seed, "synthetic", c, i))
            images.append(GrayImage(_phantom(rng, spec.image_size, params, spec, template)))
            labels.append(c)
    return images, np.asarray(labels, dtype=np.int64)


@dataclass(frozen=True)
class ComplementarySpec:
    """Multi-view data where no single view separates all classes.

    Class ``c`` is shifted by ``separation`` in view ``c % informative``
    only, so each informative view singles out some classes and lumps the
    rest together. ``noise_views`` extra views carry no class signal.
    """

    n_per_class: int = 50
    classes: int = 3
    informative: int = 2
    dim: int = 10
    separation: float = 4.0
    noise_views: int = 0
    seed: int = 0
    view_names: list[str] = field(default_factory=list)


def generate_complementary_views(spec: ComplementarySpec | None = None):
    """Return ``(views: dict[name, n x dim], labels)``."""
    spec = spec or ComplementarySpec()
    if spec.informative < 1 or spec.classes < 2:
        raise InvalidInput("need >= 1 informative view and >= 2 classes")
    rng = np.random.default_rng(derive_seed(spec.seed, "complementary"))
    n = spec.n_per_class * spec.classes
    labels = np.repeat(np.arange(spec.classes), spec.n_per_class)
    total = spec.informative + spec.noise_views
    names = spec.view_names or [f"view{v}" for v in range(total)]
    if len(names) != total:
        raise InvalidInput("view_names length must equal informative + noise_views")
    views = {}
    for v in range(total):
        X = rng.standard_normal((n, spec.dim))
        if v < spec.informative:
            direction = rng.standard_normal(spec.dim)
            direction /= np.linalg.norm(direction)
            # classes sharing this residue are the ones this view can tell apart
            for c in range(spec.classes):
                if c % spec.informative == v and c < spec.classes - 1:
                    X[labels == c] += spec.separation * direction
        views[names[v]] = X
    return views, labels
