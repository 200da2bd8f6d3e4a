"""CSV/JSON file formats shared by the CLI subcommands.

View matrix CSV: first row ``<view name>,<d>``, then one row per sample,
``sample_id,v_1,...,v_d``. Label CSV: header ``sample_id,label``.
Manifest JSON: ``n``, ``M``, ``views`` (name -> {d, file}), ``sample_ids``,
``config``.
"""
import csv
import json
from pathlib import Path

import numpy as np

from ..errors import InvalidInput, IoError
from ..views import MultiViewDataset


def _open(path, mode):
    try:
        return open(path, mode, newline="")
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from exc


def write_matrix(path, name, matrix, sample_ids):
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    with _open(path, "w") as fh:
        w = csv.writer(fh)
        w.writerow([name, matrix.shape[1]])
        for sid, row in zip(sample_ids, matrix):
            w.writerow([sid] + [repr(float(v)) for v in row])


def read_matrix(path):
    """Return ``(name, matrix, sample_ids)``."""
    with _open(path, "r") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) != 2:
        raise InvalidInput(f"{path}: header must be '<view name>,<d>'")
    name, d = rows[0][0], int(rows[0][1])
    ids, data = [], []
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != d + 1:
            raise InvalidInput(f"{path}: expected {d} values for sample {r[0]}")
        ids.append(r[0])
        data.append([float(v) for v in r[1:]])
    return name, np.asarray(data, dtype=np.float64).reshape(len(ids), d), ids


def write_labels(path, sample_ids, labels):
    with _open(path, "w") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "label"])
        for sid, lab in zip(sample_ids, labels):
            w.writerow([sid, int(lab)])


def read_labels(path) -> dict:
    """sample_id -> int label, in file order."""
    with _open(path, "r") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and rows[0][:2] == ["sample_id", "label"]:
        rows = rows[1:]
    out = {}
    for r in rows:
        if len(r) < 2:
            raise InvalidInput(f"{path}: malformed label row {r}")
        try:
            out[r[0]] = int(r[1])
        except ValueError:
            raise InvalidInput(f"{path}: non-integer label {r[1]!r}") from None
    return out


def write_dataset(out_dir, dataset: MultiViewDataset, extra_config=None):
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc
    views = {}
    for name, mat in dataset.views.items():
        fname = f"{name}.csv"
        write_matrix(out_dir / fname, name, mat, dataset.sample_ids)
        views[name] = {"d": int(mat.shape[1]), "file": fname}
    manifest = {
        "n": dataset.n,
        "M": dataset.M,
        "views": views,
        "sample_ids": list(dataset.sample_ids),
        "config": {**dataset.config, **(extra_config or {})},
    }
    if dataset.labels is not None:
        write_labels(out_dir / "labels.csv", dataset.sample_ids, dataset.labels)
        manifest["labels"] = "labels.csv"
    write_json(out_dir / "manifest.json", manifest)
    return manifest


def read_dataset(manifest_path) -> MultiViewDataset:
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.json"
    manifest = read_json(manifest_path)
    base = manifest_path.parent
    views, ids = {}, None
    for name, meta in manifest["views"].items():
        _, mat, sids = read_matrix(base / meta["file"])
        if ids is None:
            ids = sids
        elif sids != ids:
            raise InvalidInput(f"view {name} lists samples in a different order")
        views[name] = mat
    labels = None
    if manifest.get("labels"):
        lab = read_labels(base / manifest["labels"])
        labels = np.array([lab[s] for s in ids], dtype=np.int64)
    return MultiViewDataset(views, labels, ids, manifest.get("config", {}))


def write_json(path, obj):
    try:
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=1)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
