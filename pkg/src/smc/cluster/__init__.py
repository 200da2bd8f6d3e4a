"""Single-view clustering baselines and robust multi-view k-means."""
from ..errors import InvalidInput
from ._common import ClusterAssignment
from .birch import birch
from .gmm import gmm
from .hierarchy import agglomerative
from .kmeans import kmeans
from .kmedoids import kmedoids
from .rmkmc import rmkmc
from .spectral import spectral

# display names used in reports, in table column order
SINGLE_VIEW = {
    "GMM": gmm,
    "K-Means": kmeans,
    "K-Medoids": kmedoids,
    "AC": agglomerative,
    "Birch": birch,
    "SC": spectral,
}
SEEDED = {"GMM", "K-Means", "K-Medoids", "SC"}

ALIASES = {
    "gmm": "GMM", "kmeans": "K-Means", "k-means": "K-Means", "kmedoids": "K-Medoids",
    "k-medoids": "K-Medoids", "ac": "AC", "agglomerative": "AC", "birch": "Birch",
    "sc": "SC", "spectral": "SC", "rmkmc": "RMKMC",
}


def canonical_name(name):
    if name in SINGLE_VIEW or name == "RMKMC":
        return name
    try:
        return ALIASES[name.lower()]
    except KeyError:
        raise InvalidInput(f"unknown algorithm {name!r}") from None


def run_single(name, X, K, seed=0, **opts):
    """Run a single-view algorithm by display name; seed is ignored by the
    deterministic ones."""
    name = canonical_name(name)
    fn = SINGLE_VIEW[name]
    if name in SEEDED:
        res = fn(X, K, seed=seed, **opts)
    else:
        res = fn(X, K, **opts)
        res.seed = seed
    return res


__all__ = [
    "ClusterAssignment", "agglomerative", "birch", "gmm", "kmeans", "kmedoids",
    "rmkmc", "spectral", "SINGLE_VIEW", "run_single", "canonical_name",
]
