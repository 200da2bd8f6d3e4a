"""Command-line entry point: ``smc <subcommand> ...``.

Every subcommand exits 0 on success. On failure it prints one JSON object
``{"error": <code>, "message": <text>}`` to stderr and exits nonzero
(2 for invalid input, 3 for file errors, 1 otherwise).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import cluster, metrics, reduce
from .errors import InvalidInput, IoError, SmcError
from .imaging import RoiSpec, list_images, preprocess, read_image, write_pgm
from .pipeline import dataio
from .pipeline.experiment import EvalReport, ExperimentConfig, run_smc, run_ucp
from .pipeline.report import FORMATS, emit_report
from .pipeline.synthetic import (ComplementarySpec, SyntheticSpec, generate_complementary_views,
                                 generate_synthetic_corpus)
from .views import MultiViewDataset, WindowConfig, build_dataset

log = logging.getLogger("smc")


def _parse_value(text):
    """Scalar or list from a flag value, parsed as YAML (``3`` -> int, ``[a, b]`` -> list)."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InvalidInput(f"cannot parse value {text!r}: {exc}") from None


def _key_values(pairs):
    out = {}
    for item in pairs or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise InvalidInput(f"expected key=value, got {item!r}")
        out[key] = _parse_value(val)
    return out


def _set_path(d, dotted, value):
    parts = dotted.split(".")
    cur = d
    for p in parts[:-1]:
        nxt = cur.setdefault(p, {})
        if not isinstance(nxt, dict):
            raise InvalidInput(f"config key {p!r} is not a mapping")
        cur = nxt
    cur[parts[-1]] = value


def _load_config_dict(path):
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        d = yaml.safe_load(text)  # JSON is a subset of YAML
    except yaml.YAMLError as exc:
        raise InvalidInput(f"{path}: {exc}") from None
    if d is None:
        return {}
    if not isinstance(d, dict):
        raise InvalidInput(f"{path}: top level must be a mapping")
    return d


def _mkdir(path):
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {path}: {exc}") from exc
    return path


def _emit(obj):
    print(json.dumps(obj, indent=1, sort_keys=True))


# -- subcommands -------------------------------------------------------------

def cmd_preprocess(args):
    out = _mkdir(args.output_dir)
    roi = RoiSpec.parse(args.roi) if args.roi else None
    written = []
    for path in list_images(args.input_dir):
        img = preprocess(read_image(path), args.median_radius, roi)
        dest = out / f"{path.stem}.pgm"
        write_pgm(img, dest)
        written.append({"file": dest.name, "height": img.height, "width": img.width})
    if not written:
        raise InvalidInput(f"no PNG/PGM images in {args.input_dir}")
    _emit({"images": len(written), "output_dir": str(out), "files": written})


def _window_from_args(args):
    base = WindowConfig.from_dict(_load_config_dict(args.config).get("window"))
    fields = base.to_dict()
    for key in ("size", "stride", "levels"):
        val = getattr(args, key, None)
        if val is not None:
            fields[key] = val
    return WindowConfig.from_dict(fields)


def cmd_extract(args):
    paths = list_images(args.input_dir)
    label_map = dataio.read_labels(args.labels) if args.labels else None
    if label_map is not None:
        missing = [p.stem for p in paths if p.stem not in label_map]
        if missing:
            raise InvalidInput(f"images without labels: {missing[:5]}")
    if not paths:
        raise InvalidInput(f"no PNG/PGM images in {args.input_dir}")
    ids = [p.stem for p in paths]
    labels = [label_map[i] for i in ids] if label_map is not None else None
    ds = build_dataset([read_image(p) for p in paths], labels, _window_from_args(args),
                       sample_ids=ids, backend=args.backend)
    manifest = dataio.write_dataset(args.output_dir, ds)
    _emit({k: manifest[k] for k in ("n", "M", "views")})


def _load_views(inputs) -> MultiViewDataset:
    """Views from a manifest (file or directory) or from individual matrix CSVs."""
    if len(inputs) == 1 and (Path(inputs[0]).is_dir() or str(inputs[0]).endswith(".json")):
        return dataio.read_dataset(inputs[0])
    views, ids = {}, None
    for path in inputs:
        name, mat, sids = dataio.read_matrix(path)
        if name in views:
            raise InvalidInput(f"view {name!r} given twice")
        if ids is not None and sids != ids:
            raise InvalidInput(f"{path}: sample order differs from the first matrix")
        ids = sids
        views[name] = mat
    return MultiViewDataset(views, None, ids)


def cmd_reduce(args):
    ds = _load_views(args.inputs)
    label_map = dataio.read_labels(args.labels)
    train = [i for i, s in enumerate(ds.sample_ids) if s in label_map]
    if not train:
        raise InvalidInput("no sample in the label file matches the matrices")
    y = np.array([label_map[ds.sample_ids[i]] for i in train], dtype=np.int64)
    out = _mkdir(args.output_dir)
    models = _mkdir(out / "models")
    reduced = {}
    for name, X in ds.views.items():
        if args.method == "lda":
            model = reduce.lda_fit(X[train], y, k=args.k, ridge=args.ridge)
        else:
            k = args.k or (np.unique(y).size - 1)
            model = reduce.pca_fit(X[train], k)
        model = reduce.ProjectionModel(model.kind, model.mean, model.basis, model.class_count,
                                       model.eigenvalues,
                                       {**model.config, "view": name, "fit_samples": len(train)})
        model.save(models / f"{name}.json")
        reduced[name] = reduce.transform(model, X)
    res = MultiViewDataset(reduced, None, ds.sample_ids, {"reduction": args.method})
    manifest = dataio.write_dataset(out, res)
    _emit({"method": args.method, "fit_samples": len(train), "views": manifest["views"]})


def cmd_cluster(args):
    ds = _load_views(args.inputs)
    opts = _key_values(args.option)
    name = cluster.canonical_name(args.algorithm)
    if name == "RMKMC":
        res = cluster.rmkmc(list(ds.views.values()), args.K, seed=args.seed, **opts)
    else:
        if ds.M != 1 and not args.view:
            raise InvalidInput(f"{name} is single-view; pass one matrix or --view")
        X = ds.views[args.view] if args.view else next(iter(ds.views.values()))
        res = cluster.run_single(name, X, args.K, seed=args.seed, **opts)
    out = _mkdir(args.output_dir)
    dataio.write_labels(out / "labels.csv", ds.sample_ids, res.labels)
    diag = {"algorithm": name, "K": res.K, "seed": res.seed, "options": opts,
            "objective_trace": [float(v) for v in res.objective_trace]}
    if name == "RMKMC":
        diag["views"] = ds.names
        diag["alpha"] = res.info["alpha"].tolist()
        diag["gamma"] = res.info["gamma"]
    dataio.write_json(out / "diagnostics.json", diag)
    _emit({"labels": str(out / "labels.csv"), "clusters": int(np.unique(res.labels).size),
           "iterations": len(res.objective_trace)})


def cmd_evaluate(args):
    truth = dataio.read_labels(args.truth)
    pred = dataio.read_labels(args.pred)
    common = [s for s in truth if s in pred]
    if len(common) != len(truth) or len(common) != len(pred):
        raise InvalidInput(f"label files cover different samples ({len(truth)} vs {len(pred)}, "
                           f"{len(common)} shared)")
    vals = metrics.evaluate([truth[s] for s in common], [pred[s] for s in common])
    _emit({k: round(v, args.digits) for k, v in vals.items()} | {"n": len(common)})


def cmd_synth(args):
    cfg = _load_config_dict(args.config)
    out = _mkdir(args.output_dir)
    if args.kind == "images":
        fields = dict(cfg.get("synthetic", cfg))
        if args.seed is not None:
            fields["seed"] = args.seed
        if args.n_per_class is not None:
            fields["n_per_class"] = args.n_per_class
        spec = SyntheticSpec.from_dict(fields)
        images, labels = generate_synthetic_corpus(spec)
        width = len(str(len(images) - 1))
        ids = [f"img{i:0{width}d}" for i in range(len(images))]
        for sid, img in zip(ids, images):
            write_pgm(img, out / f"{sid}.pgm")
        dataio.write_labels(out / "labels.csv", ids, labels)
        dataio.write_json(out / "spec.json", spec.to_dict())
        _emit({"kind": "images", "n": len(images), "output_dir": str(out)})
    else:
        fields = dict(cfg.get("complementary", cfg))
        if args.seed is not None:
            fields["seed"] = args.seed
        if args.n_per_class is not None:
            fields["n_per_class"] = args.n_per_class
        views, labels = generate_complementary_views(ComplementarySpec(**fields))
        ids = [f"s{i}" for i in range(labels.size)]
        manifest = dataio.write_dataset(out, MultiViewDataset(views, labels, ids))
        _emit({"kind": "complementary", "n": manifest["n"], "M": manifest["M"],
               "output_dir": str(out)})


def _experiment_config(args) -> ExperimentConfig:
    d = _load_config_dict(args.config)
    for dotted, val in _key_values(args.set).items():
        _set_path(d, dotted, val)
    if args.seed is not None:
        d["seed"] = args.seed
    if args.folds is not None:
        d.setdefault("split", {})["fold_count"] = args.folds
        d["split"].pop("labeled_fraction", None)
    if args.jobs is not None:
        d["n_jobs"] = args.jobs
    if args.output_dir is not None:
        d["output_dir"] = args.output_dir
    return ExperimentConfig.from_dict(d)


def _run(args, runner):
    config = _experiment_config(args)
    report = runner(config)
    out = _mkdir(config.output_dir or f"results/{report.method.lower()}")
    emit_report(report, out, formats=("csv", "json"))
    summary = {"method": report.method, "output_dir": str(out),
               "mean_acc": report.overall_mean("Acc"),
               "fit_reads_test_indices": report.diagnostics["fit_reads_test_indices"]}
    if report.has_rmkmc:
        summary["rmkmc_acc"] = report.mean_over("RMKMC", "Acc")
    _emit(summary)


def cmd_run_smc(args):
    _run(args, run_smc)


def cmd_run_ucp(args):
    _run(args, run_ucp)


def cmd_report(args):
    reports = [EvalReport.load_json(p) for p in args.reports]
    formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())
    written = emit_report(reports, args.output_dir, formats=formats)
    _emit({"written": [str(p) for p in written]})


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("preprocess", help="median filter, normalize and crop images to PGM")
    s.add_argument("input_dir")
    s.add_argument("output_dir")
    s.add_argument("--median-radius", type=int, default=1)
    s.add_argument("--roi", help="auto:<threshold> or rect:x0,y0,w,h")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("extract", help="seven texture views per image to CSV matrices")
    s.add_argument("input_dir")
    s.add_argument("output_dir")
    s.add_argument("--labels", help="CSV sample_id,label (sample_id = file stem)")
    s.add_argument("--config", help="YAML/JSON file; its 'window' mapping is used")
    s.add_argument("--size", type=int)
    s.add_argument("--stride", type=int)
    s.add_argument("--levels", type=int)
    s.add_argument("--backend", choices=("python", "compiled"))
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("reduce", help="fit LDA or PCA on labeled rows, project all rows")
    s.add_argument("inputs", nargs="+", help="manifest.json, its directory, or matrix CSVs")
    s.add_argument("--labels", required=True, help="labels of the rows to fit on")
    s.add_argument("--method", choices=("lda", "pca"), default="lda")
    s.add_argument("--k", type=int)
    s.add_argument("--ridge", type=float, default=reduce.DEFAULT_RIDGE)
    s.add_argument("--output-dir", "-o", required=True)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("cluster", help="cluster matrices with one algorithm")
    s.add_argument("inputs", nargs="+", help="manifest.json, its directory, or matrix CSVs")
    s.add_argument("--algorithm", "-a", required=True,
                   help="GMM, K-Means, K-Medoids, AC, Birch, SC or RMKMC")
    s.add_argument("--K", "-k", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--view", help="view to use when a manifest holds several")
    s.add_argument("--option", action="append", metavar="KEY=VALUE",
                   help="algorithm option, repeatable (for example gamma=3)")
    s.add_argument("--output-dir", "-o", required=True)
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("evaluate", help="Acc, FM, RI and Rand of predicted labels")
    s.add_argument("truth")
    s.add_argument("pred")
    s.add_argument("--digits", type=int, default=3)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("synth", help="write a synthetic labeled corpus")
    s.add_argument("output_dir")
    s.add_argument("--kind", choices=("images", "complementary"), default="images")
    s.add_argument("--config", help="YAML/JSON generator fields")
    s.add_argument("--seed", type=int)
    s.add_argument("--n-per-class", type=int)
    s.set_defaults(func=cmd_synth)

    for name, func, what in (("run-smc", cmd_run_smc, "LDA"), ("run-ucp", cmd_run_ucp, "PCA")):
        s = sub.add_parser(name, help=f"cross-validated experiment with {what} reduction")
        s.add_argument("--config", "-c", help="experiment YAML/JSON")
        s.add_argument("--set", action="append", metavar="KEY.PATH=VALUE",
                       help="override a config entry, repeatable")
        s.add_argument("--seed", type=int)
        s.add_argument("--folds", type=int)
        s.add_argument("--jobs", type=int)
        s.add_argument("--output-dir", "-o")
        s.set_defaults(func=func)

    s = sub.add_parser("report", help="tables and charts from saved report JSON files")
    s.add_argument("reports", nargs="+", help="report.json files (e.g. SMC then UCP)")
    s.add_argument("--output-dir", "-o", required=True)
    s.add_argument("--formats", default=",".join(FORMATS))
    s.set_defaults(func=cmd_report)
    return p


_EXIT = {"InvalidInput": 2, "DegenerateClass": 2, "IoError": 3}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except SmcError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return _EXIT.get(exc.code, 1)
    except (KeyError, ValueError, TypeError) as exc:
        # malformed config or option values that escaped validation
        print(json.dumps({"error": "InvalidInput", "message": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "IoError", "message": str(exc)}), file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
