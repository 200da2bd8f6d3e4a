import json
import subprocess
import sys

import numpy as np
import pytest

from smc.cli import main
from smc.pipeline import dataio


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["synth", str(root / "imgs"), "--n-per-class", "5", "--seed", "2"]) == 0
    return root


def test_synth_preprocess_extract_reduce_cluster_evaluate(corpus, capsys, tmp_path):
    imgs = corpus / "imgs"
    assert len(list(imgs.glob("*.pgm"))) == 15
    code, out, _ = run(capsys, "preprocess", imgs, tmp_path / "pre", "--median-radius", 1,
                       "--roi", "rect:0,0,20,20")
    assert code == 0 and json.loads(out)["images"] == 15
    code, out, _ = run(capsys, "extract", tmp_path / "pre", tmp_path / "feat", "--labels",
                       imgs / "labels.csv", "--stride", 2)
    assert code == 0
    manifest = json.loads((tmp_path / "feat" / "manifest.json").read_text())
    assert manifest["n"] == 15 and manifest["M"] == 7 and manifest["views"]["sigma"]["d"] == 49
    assert manifest["config"]["window"]["stride"] == 2

    code, out, _ = run(capsys, "reduce", tmp_path / "feat", "--labels", imgs / "labels.csv",
                       "-o", tmp_path / "red")
    assert code == 0
    model = json.loads((tmp_path / "red" / "models" / "contrast.json").read_text())
    assert model["kind"] == "LDA" and model["k"] == 2 and model["config"]["view"] == "contrast"

    code, out, _ = run(capsys, "cluster", tmp_path / "red", "-a", "rmkmc", "-k", 3,
                       "--option", "gamma=3", "-o", tmp_path / "cl")
    assert code == 0
    diag = json.loads((tmp_path / "cl" / "diagnostics.json").read_text())
    assert len(diag["alpha"]) == 7 and diag["gamma"] == 3
    assert abs(sum(diag["alpha"]) - 1) < 1e-12
    assert np.all(np.diff(diag["objective_trace"]) <= 1e-9)

    code, out, _ = run(capsys, "cluster", tmp_path / "red" / "sigma.csv", "-a", "K-Means",
                       "-o", tmp_path / "km")
    assert code == 0
    code, out, _ = run(capsys, "evaluate", imgs / "labels.csv", tmp_path / "km" / "labels.csv")
    vals = json.loads(out)
    assert code == 0 and set(vals) == {"Acc", "FM", "RI", "Rand", "n"} and vals["n"] == 15


def test_experiment_and_report(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("data:\n  source: complementary\n  complementary: {n_per_class: 10}\n"
                   "split: {labeled_fraction: 0.8}\nalgorithms: [kmeans, ac]\nseed: 1\n")
    code, out, _ = run(capsys, "run-smc", "-c", cfg, "-o", tmp_path / "smc", "--set", "K=3")
    assert code == 0 and json.loads(out)["fit_reads_test_indices"] == 0
    code, out, _ = run(capsys, "run-ucp", "-c", cfg, "-o", tmp_path / "ucp")
    assert code == 0
    report = json.loads((tmp_path / "smc" / "report.json").read_text())
    assert report["config"]["split"] == {"labeled_fraction": 0.8}
    assert report["config"]["K"] == 3
    header = (tmp_path / "smc" / "table_acc.csv").read_text().splitlines()[0]
    assert header == "View,K-Means,AC,Average,RMKMC"
    code, out, _ = run(capsys, "report", tmp_path / "smc" / "report.json",
                       tmp_path / "ucp" / "report.json", "-o", tmp_path / "rep")
    assert code == 0
    assert (tmp_path / "rep" / "by_algorithm_acc.svg").exists()
    assert (tmp_path / "rep" / "ucp" / "table_fm.csv").exists()


def test_synth_complementary(tmp_path, capsys):
    code, out, _ = run(capsys, "synth", tmp_path / "c", "--kind", "complementary", "--seed", 3)
    assert code == 0
    ds = dataio.read_dataset(tmp_path / "c")
    assert ds.M == 2 and ds.n == 150 and ds.labels is not None


@pytest.mark.parametrize("argv,code,error", [
    (["evaluate", "missing.csv", "missing2.csv"], 3, "IoError"),
    (["run-smc", "--set", "bogus=1"], 2, "InvalidInput"),
    (["run-smc", "--set", "split.labeled_fraction=0.7"], 2, "InvalidInput"),
    (["cluster", "nope.csv", "-a", "dbscan", "-o", "x"], 3, "IoError"),
])
def test_errors_are_json_on_stderr(argv, code, error, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    got, out, err = run(capsys, *argv)
    assert got == code
    payload = json.loads(err)
    assert payload["error"] == error and payload["message"]


def test_unknown_algorithm(tmp_path, capsys):
    dataio.write_matrix(tmp_path / "m.csv", "a", np.zeros((4, 2)), list("wxyz"))
    code, _, err = run(capsys, "cluster", tmp_path / "m.csv", "-a", "dbscan", "-o", tmp_path / "o")
    assert code == 2 and json.loads(err)["error"] == "InvalidInput"


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "smc.cli", "evaluate", "a.csv", "b.csv"],
                          cwd=tmp_path, capture_output=True, text=True)
    assert proc.returncode == 3 and json.loads(proc.stderr)["error"] == "IoError"
