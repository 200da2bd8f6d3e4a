"""Cross-validated semi-supervised clustering experiments.

For every fold, a projection (LDA for SMC, PCA for the unsupervised
baseline) is fitted per view on the fold's labeled training rows. The
held-out rows are then projected and clustered by each single-view
algorithm, and RMKMC clusters all projected views jointly. Every result is
scored against the held-out labels.
"""
from __future__ import annotations

import copy
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import cluster, metrics, reduce
from ..errors import FoldError, InvalidInput, IoError, SmcError
from ..imaging import RoiSpec, preprocess, read_image, list_images
from ..views import MultiViewDataset, WindowConfig, build_dataset
from . import dataio
from .seeds import derive_seed
from .splits import fold_count_for, stratified_folds
from .synthetic import ComplementarySpec, SyntheticSpec, generate_complementary_views, generate_synthetic_corpus

log = logging.getLogger(__name__)

METRICS = ("Acc", "FM", "Rand")
MULTI_VIEW = "multi-view"
DEFAULT_ALGORITHMS = tuple(cluster.SINGLE_VIEW)


@dataclass
class ExperimentConfig:
    """Parsed experiment configuration; ``raw`` keeps the mapping as given."""

    data: dict = field(default_factory=lambda: {"source": "synthetic"})
    window: WindowConfig = field(default_factory=WindowConfig)
    reduction: dict = field(default_factory=dict)
    algorithms: tuple[str, ...] = DEFAULT_ALGORITHMS
    algorithm_options: dict = field(default_factory=dict)
    rmkmc: dict = field(default_factory=dict)
    K: int = 3
    fold_count: int = 5
    seed: int = 0
    output_dir: str | None = None
    cluster_all: bool = False
    n_jobs: int = 1
    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 2:
            raise InvalidInput("K must be an integer >= 2")
        if not self.algorithms:
            raise InvalidInput("algorithm list must be non-empty")
        self.algorithms = tuple(cluster.canonical_name(a) for a in self.algorithms)
        if "RMKMC" in self.algorithms:
            raise InvalidInput("RMKMC is configured under 'rmkmc', not 'algorithms'")
        red = {"k": None, "ridge": reduce.DEFAULT_RIDGE, "transductive_pca": False}
        red.update(self.reduction or {})
        self.reduction = red
        rm = {"enabled": True, "gamma": 2.0, "standardize": "view"}
        rm.update(self.rmkmc or {})
        if rm["gamma"] <= 1:
            raise InvalidInput("rmkmc.gamma must be > 1")
        self.rmkmc = rm

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        raw = copy.deepcopy(d)
        d = dict(d)
        known = {"data", "window", "reduction", "algorithms", "algorithm_options", "rmkmc",
                 "K", "split", "seed", "output_dir", "cluster_all", "n_jobs"}
        unknown = set(d) - known
        if unknown:
            raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
        split = d.pop("split", {}) or {}
        fold_count = fold_count_for(split.get("labeled_fraction"), split.get("fold_count"))
        window = WindowConfig.from_dict(d.pop("window", None))
        algos = d.pop("algorithms", None) or DEFAULT_ALGORITHMS
        return cls(window=window, algorithms=tuple(algos), fold_count=fold_count, raw=raw, **d)

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        text = _read_text(path)
        if str(path).endswith((".yaml", ".yml")):
            import yaml

            d = yaml.safe_load(text) or {}
        else:
            d = json.loads(text)
        return cls.from_dict(d)

    def with_overrides(self, **kw) -> ExperimentConfig:
        """Copy with selected fields replaced; overrides are echoed in ``raw``."""
        raw = copy.deepcopy(self.raw)
        out = copy.copy(self)
        for key, val in kw.items():
            if val is None:
                continue
            setattr(out, key, val)
            raw.setdefault("overrides", {})[key] = val
        out.raw = raw
        out.__post_init__()
        return out


def _read_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def load_dataset(config: ExperimentConfig) -> MultiViewDataset:
    """Materialize the configured data source as a labeled multi-view dataset."""
    data = dict(config.data or {})
    source = data.get("source", "synthetic")
    if source == "synthetic":
        spec = SyntheticSpec.from_dict(data.get("synthetic", {}))
        images, labels = generate_synthetic_corpus(spec)
        return build_dataset(images, labels, config.window)
    if source == "complementary":
        spec = ComplementarySpec(**data.get("complementary", {}))
        views, labels = generate_complementary_views(spec)
        return MultiViewDataset(views, labels)
    if source == "images":
        image_dir = data.get("image_dir")
        label_map = dataio.read_labels(data["labels"])
        pre = data.get("preprocess", {}) or {}
        roi = RoiSpec.parse(pre["roi"]) if pre.get("roi") else None
        radius = pre.get("median_radius", 1)
        paths = [p for p in list_images(image_dir) if p.stem in label_map]
        if not paths:
            raise InvalidInput(f"no labeled images in {image_dir}")
        images = [preprocess(read_image(p), radius, roi) for p in paths]
        ids = [p.stem for p in paths]
        return build_dataset(images, [label_map[i] for i in ids], config.window, sample_ids=ids)
    if source == "matrices":
        ds = dataio.read_dataset(data["manifest"])
        label_map = dataio.read_labels(data["labels"])
        keep = [i for i, s in enumerate(ds.sample_ids) if s in label_map]
        ds = ds.subset(keep)
        ds.labels = np.array([label_map[s] for s in ds.sample_ids], dtype=np.int64)
        return MultiViewDataset(ds.views, ds.labels, ds.sample_ids, ds.config)
    raise InvalidInput(f"unknown data source {source!r}")


class AccessLog:
    """Records which sample indices each fitting step reads.

    Projections get their rows only through :meth:`fit_rows`, so a test can
    assert that no held-out index was ever used to fit.
    """

    def __init__(self, dataset: MultiViewDataset):
        self._ds = dataset
        self.fit_reads: list[tuple[int, str, np.ndarray]] = []

    def fit_rows(self, fold, view, idx):
        idx = np.asarray(idx)
        self.fit_reads.append((fold, view, idx.copy()))
        return self._ds.views[view][idx]

    def fit_labels(self, fold, idx):
        idx = np.asarray(idx)
        self.fit_reads.append((fold, "<labels>", idx.copy()))
        return self._ds.labels[idx]

    def rows(self, view, idx):
        return self._ds.views[view][np.asarray(idx)]

    def leaked(self, plan) -> int:
        """Number of test indices read during fitting, summed over reads."""
        tests = plan.test_sets()
        return int(sum(np.isin(idx, tests[f]).sum() for f, _, idx in self.fit_reads))


def array_digest(a) -> str:
    a = np.ascontiguousarray(a, dtype=np.float64)
    return hashlib.sha256(a.tobytes() + str(a.shape).encode()).hexdigest()[:16]


@dataclass
class EvalReport:
    """Per-fold metric values keyed by (row, algorithm).

    Rows are view names; RMKMC results sit in row ``"multi-view"``.
    """

    method: str
    views: list[str]
    algorithms: list[str]
    fold_count: int
    raw: dict = field(default_factory=dict)       # (row, alg) -> {metric: [fold values]}
    config: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def values(self, row, alg, metric) -> np.ndarray:
        return np.asarray(self.raw[(row, alg)][metric], dtype=np.float64)

    def cell(self, row, alg, metric) -> tuple[float, float]:
        v = self.values(row, alg, metric)
        return float(v.mean()), float(v.std())

    def pooled(self, cells, metric) -> tuple[float, float]:
        """Average the cells within each fold, then mean and std over folds."""
        per_fold = np.mean([self.values(r, a, metric) for r, a in cells], axis=0)
        return float(per_fold.mean()), float(per_fold.std())

    def algorithm_average(self, alg, metric):
        """Across views, for one single-view algorithm (the tables' Average row)."""
        return self.pooled([(v, alg) for v in self.views], metric)

    def view_average(self, view, metric, include_rmkmc=False):
        """Across single-view algorithms for one view (the tables' Average column)."""
        cells = [(view, a) for a in self.algorithms]
        if include_rmkmc and self.has_rmkmc:
            cells.append((MULTI_VIEW, "RMKMC"))
        return self.pooled(cells, metric)

    @property
    def has_rmkmc(self) -> bool:
        return (MULTI_VIEW, "RMKMC") in self.raw

    def mean_over(self, alg, metric) -> float:
        """Mean over all folds (and views, for single-view algorithms)."""
        if alg == "RMKMC":
            return self.cell(MULTI_VIEW, "RMKMC", metric)[0]
        return self.algorithm_average(alg, metric)[0]

    def overall_mean(self, metric) -> float:
        """Mean over every single-view cell; the headline number for comparisons."""
        return self.pooled([(v, a) for v in self.views for a in self.algorithms], metric)[0]

    def to_dict(self) -> dict:
        rows = []
        for (row, alg), vals in self.raw.items():
            entry = {"row": row, "algorithm": alg, "folds": {m: list(vals[m]) for m in METRICS}}
            for m in METRICS:
                mean, std = self.cell(row, alg, m)
                entry[m] = {"mean": mean, "std": std}
            rows.append(entry)
        averages = {
            "by_algorithm": {a: {m: list(self.algorithm_average(a, m)) for m in METRICS}
                             for a in self.algorithms},
            "by_view": {v: {m: list(self.view_average(v, m)) for m in METRICS} for v in self.views},
        }
        if self.has_rmkmc:
            averages["by_view_with_rmkmc"] = {
                v: {m: list(self.view_average(v, m, True)) for m in METRICS} for v in self.views}
        return {
            "method": self.method,
            "views": self.views,
            "algorithms": self.algorithms,
            "fold_count": self.fold_count,
            "metrics": list(METRICS),
            "rows": rows,
            "averages": averages,
            "config": self.config,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, d) -> EvalReport:
        raw = {(r["row"], r["algorithm"]): {m: list(r["folds"][m]) for m in METRICS}
               for r in d["rows"]}
        return cls(d["method"], list(d["views"]), list(d["algorithms"]), int(d["fold_count"]),
                   raw, d.get("config", {}), d.get("diagnostics", {}))

    def save_json(self, path) -> None:
        try:
            with open(path, "w") as fh:
                json.dump(self.to_dict(), fh, indent=1)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc

    @classmethod
    def load_json(cls, path) -> EvalReport:
        return cls.from_dict(json.loads(_read_text(path)))


def _project(method, access, fold, view, train, test, config):
    k = config.reduction.get("k") or (config.K - 1)
    Xtr = access.fit_rows(fold, view, train)
    if method == "LDA":
        ytr = access.fit_labels(fold, train)
        model = reduce.lda_fit(Xtr, ytr, k=k, ridge=config.reduction["ridge"])
    else:
        if config.reduction.get("transductive_pca"):
            # deliberate transductive variant: PCA sees the unlabeled rows too,
            # and the access log counts them
            Xtr = access.fit_rows(fold, view, np.concatenate([train, test]))
        model = reduce.pca_fit(Xtr, k)
    target = np.concatenate([train, test]) if config.cluster_all else test
    return reduce.transform(model, access.rows(view, target)), target


def _run_fold(method, f, train, test, dataset, access, config):
    views = dataset.names
    reduced = {}
    target = None
    for v in views:
        reduced[v], target = _project(method, access, f, v, train, test, config)
    y = dataset.labels[target]
    out = {}
    for v in views:
        for alg in config.algorithms:
            opts = config.algorithm_options.get(alg, {})
            seed = derive_seed(config.seed, "fold", f, "view", v, "alg", alg)
            res = cluster.run_single(alg, reduced[v], config.K, seed=seed, **opts)
            out[(v, alg)] = metrics.evaluate(y, res.labels)
    diag = {"fold": f, "n_train": int(train.size), "n_clustered": int(target.size),
            "reduced_digest": {v: array_digest(reduced[v]) for v in views}}
    if config.rmkmc["enabled"]:
        seed = derive_seed(config.seed, "fold", f, "RMKMC")
        mv = [reduced[v] for v in views]
        diag["rmkmc_input_digest"] = {v: array_digest(x) for v, x in zip(views, mv)}
        res = cluster.rmkmc(mv, config.K, gamma=config.rmkmc["gamma"], seed=seed,
                            standardize_views=config.rmkmc["standardize"])
        out[(MULTI_VIEW, "RMKMC")] = metrics.evaluate(y, res.labels)
        diag["rmkmc_alpha"] = dict(zip(views, res.info["alpha"].tolist()))
        diag["rmkmc_iterations"] = len(res.objective_trace) - 1
    return out, diag


def run_experiment(config: ExperimentConfig, method: str = "LDA",
                   dataset: MultiViewDataset | None = None, access: AccessLog | None = None) -> EvalReport:
    if method not in ("LDA", "PCA"):
        raise InvalidInput(f"method must be LDA or PCA, got {method!r}")
    if dataset is None:
        dataset = load_dataset(config)
    if dataset.labels is None:
        raise InvalidInput("experiments need a labeled dataset")
    plan = stratified_folds(dataset.labels, config.fold_count, derive_seed(config.seed, "split"))
    access = access or AccessLog(dataset)

    def task(f):
        train, test = plan.folds[f]
        try:
            return _run_fold(method, f, train, test, dataset, access, config)
        except SmcError as exc:
            raise FoldError(f, exc) from exc
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise FoldError(f, exc) from exc

    if config.n_jobs > 1:
        with ThreadPoolExecutor(config.n_jobs) as pool:
            results = list(pool.map(task, range(plan.fold_count)))
    else:
        results = [task(f) for f in range(plan.fold_count)]

    algorithms = list(config.algorithms)
    raw = {}
    for v in dataset.names:
        for a in algorithms:
            raw[(v, a)] = {m: [res[0][(v, a)][m] for res in results] for m in METRICS}
    if config.rmkmc["enabled"]:
        raw[(MULTI_VIEW, "RMKMC")] = {m: [res[0][(MULTI_VIEW, "RMKMC")][m] for res in results]
                                      for m in METRICS}
    diagnostics = {
        "folds": [res[1] for res in results],
        "split": plan.to_dict(),
        "fit_reads_test_indices": access.leaked(plan),
        "n": dataset.n,
        "dims": dataset.dims(),
    }
    name = "SMC" if method == "LDA" else "UCP"
    return EvalReport(name, dataset.names, algorithms, plan.fold_count, raw,
                      copy.deepcopy(config.raw), diagnostics)


def run_smc(config: ExperimentConfig, dataset=None, access=None) -> EvalReport:
    """LDA fitted on each fold's labeled split, clustering on the held-out split."""
    return run_experiment(config, "LDA", dataset, access)


def run_ucp(config: ExperimentConfig, dataset=None, access=None) -> EvalReport:
    """Same flow with PCA in place of LDA, dimension-matched to the LDA run."""
    return run_experiment(config, "PCA", dataset, access)
