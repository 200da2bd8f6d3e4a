import csv
import io
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from smc.errors import InvalidInput, IoError
from smc.pipeline.experiment import METRICS, MULTI_VIEW, EvalReport
from smc.pipeline.report import (comparison_charts, emit_report, format_cell, parse_cell,
                                 table_csv, table_rows)

VIEWS = ["contrast", "homogeneity", "energy", "correlation", "sigma", "skew", "kurtosis"]
ALGS = ["GMM", "K-Means", "K-Medoids", "AC", "Birch", "SC"]


def fake_report(method="SMC", folds=5, seed=0):
    rng = np.random.default_rng(seed)
    raw = {(v, a): {m: rng.uniform(0.2, 0.9, folds).tolist() for m in METRICS}
           for v in VIEWS for a in ALGS}
    raw[(MULTI_VIEW, "RMKMC")] = {m: rng.uniform(0.2, 0.9, folds).tolist() for m in METRICS}
    return EvalReport(method, VIEWS, ALGS, folds, raw)


def test_cell_format():
    assert format_cell("Acc", 0.74, 0.089) == "74.0±8.9"
    assert format_cell("FM", 0.591, 0.114) == "0.59±0.11"
    assert format_cell("Rand", -0.05, 0.0) == "-0.05±0.00"
    assert parse_cell("74.0±8.9") == (74.0, 8.9)


def test_table_layout():
    rows = table_rows(fake_report(), "Acc")
    assert rows[0] == ["View"] + ALGS + ["Average", "RMKMC"]
    assert [r[0] for r in rows[1:]] == [v.capitalize() for v in VIEWS] + ["Average"]
    assert all(len(r) == 9 for r in rows)
    assert all(r[-1] == "" for r in rows[1:-1]) and rows[-1][-1] != ""


def test_csv_round_trip_means():
    rep = fake_report()
    for metric in METRICS:
        rows = list(csv.reader(io.StringIO(table_csv(rep, metric))))
        scale = 100.0 if metric == "Acc" else 1.0
        tol = 0.05 if metric == "Acc" else 0.005
        for r, view in zip(rows[1:8], VIEWS):
            for cell, alg in zip(r[1:7], ALGS):
                mean, std = parse_cell(cell)
                exp_mean, exp_std = rep.cell(view, alg, metric)
                assert abs(mean - scale * exp_mean) <= tol + 1e-9
                assert abs(std - scale * exp_std) <= tol + 1e-9
        assert abs(parse_cell(rows[-1][-1])[0] - scale * rep.cell(MULTI_VIEW, "RMKMC", metric)[0]) <= tol


def test_single_fold_std_zero():
    rep = fake_report(folds=1)
    for metric in METRICS:
        for r in table_rows(rep, metric)[1:]:
            for cell in r[1:]:
                if cell:
                    assert parse_cell(cell)[1] == 0.0


def test_emit_single_and_pair(tmp_path):
    files = emit_report(fake_report(), tmp_path / "one")
    names = {p.name for p in files}
    assert {"table_acc.csv", "table_fm.csv", "table_rand.csv", "report.json"} <= names
    files = emit_report([fake_report("SMC"), fake_report("UCP", seed=1)], tmp_path / "two")
    assert (tmp_path / "two" / "smc" / "table_acc.csv").exists()
    assert (tmp_path / "two" / "ucp" / "report.json").exists()
    svgs = [p for p in files if p.suffix == ".svg"]
    assert len(svgs) == 9
    for p in svgs:
        root = ET.parse(p).getroot()
        assert root.tag.endswith("svg")


def test_chart_content():
    charts = comparison_charts([fake_report("SMC"), fake_report("UCP", seed=1)])
    svg = charts["by_algorithm_acc.svg"]
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    bars = [r for r in root.iter(ns + "rect") if r.find(ns + "title") is not None]
    assert len(bars) == 2 * 7  # two methods x (6 algorithms + RMKMC)
    assert "RMKMC" in svg and "SMC" in svg and "UCP" in svg
    view_bars = [r for r in ET.fromstring(charts["by_view_fm.svg"]).iter(ns + "rect")
                 if r.find(ns + "title") is not None]
    assert len(view_bars) == 2 * 7


def test_emit_errors(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IoError):
        emit_report(fake_report(), blocker / "sub")
    with pytest.raises(InvalidInput):
        emit_report(fake_report(), tmp_path, formats=("pdf",))
    other = fake_report()
    other.views = VIEWS[:3]
    with pytest.raises(InvalidInput):
        comparison_charts([fake_report(), other])
