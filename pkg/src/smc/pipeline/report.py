"""Result tables (CSV), raw dumps (JSON) and grouped-bar charts (SVG).

Table layout: one row per view plus an ``Average`` row; columns are the
single-view algorithms, an ``Average`` column and ``RMKMC``. RMKMC clusters
all views jointly, so its cell appears only in the ``Average`` row. Cells
read ``mean±std`` over folds: Acc as a percentage with one decimal, FM and
Rand with two decimals.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from xml.sax.saxutils import escape

from ..errors import InvalidInput, IoError
from .dataio import write_json
from .experiment import METRICS, MULTI_VIEW, EvalReport

PM = "±"
TABLE_FILES = {"Acc": "table_acc.csv", "FM": "table_fm.csv", "Rand": "table_rand.csv"}
FORMATS = ("csv", "json", "svg")


def format_cell(metric: str, mean: float, std: float) -> str:
    if metric == "Acc":
        return f"{100.0 * mean:.1f}{PM}{100.0 * std:.1f}"
    return f"{mean:.2f}{PM}{std:.2f}"


def parse_cell(text: str) -> tuple[float, float]:
    """Inverse of :func:`format_cell` up to formatting precision (Acc stays in percent)."""
    mean, _, std = text.partition(PM)
    return float(mean), float(std)


def _title(view: str) -> str:
    return view[:1].upper() + view[1:]


def table_rows(report: EvalReport, metric: str) -> list[list[str]]:
    """Header plus data rows of one metric table, as strings."""
    if metric not in METRICS:
        raise InvalidInput(f"unknown metric {metric!r}")
    header = ["View", *report.algorithms, "Average", "RMKMC"]
    rows = [header]
    for v in report.views:
        cells = [format_cell(metric, *report.cell(v, a, metric)) for a in report.algorithms]
        cells.append(format_cell(metric, *report.view_average(v, metric)))
        rows.append([_title(v), *cells, ""])
    avg = [format_cell(metric, *report.algorithm_average(a, metric)) for a in report.algorithms]
    every = [(v, a) for v in report.views for a in report.algorithms]
    avg.append(format_cell(metric, *report.pooled(every, metric)))
    avg.append(format_cell(metric, *report.cell(MULTI_VIEW, "RMKMC", metric))
               if report.has_rmkmc else "")
    rows.append(["Average", *avg])
    return rows


def table_csv(report: EvalReport, metric: str) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(table_rows(report, metric))
    return buf.getvalue()


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _series_by_algorithm(report: EvalReport, metric: str):
    labels = list(report.algorithms)
    values = [report.algorithm_average(a, metric) for a in labels]
    if report.has_rmkmc:
        labels.append("RMKMC")
        values.append(report.cell(MULTI_VIEW, "RMKMC", metric))
    return labels, values


def _series_by_view(report: EvalReport, metric: str, include_rmkmc: bool):
    labels = [_title(v) for v in report.views]
    values = [report.view_average(v, metric, include_rmkmc) for v in report.views]
    return labels, values


def bar_chart_svg(title: str, groups: list[str], series: dict[str, list[tuple[float, float]]],
                  y_label: str = "", y_range: tuple[float, float] | None = None) -> str:
    """Grouped bar chart with one bar per series inside each group and std whiskers."""
    names = list(series)
    if not names or any(len(v) != len(groups) for v in series.values()):
        raise InvalidInput("every series needs one (mean, std) per group")
    palette = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"]
    width, height = max(480, 70 * len(groups) + 120), 340
    left, right, top, bottom = 60, 20, 40, 60
    pw, ph = width - left - right, height - top - bottom
    if y_range is None:
        lo = min(0.0, min(m - s for v in series.values() for m, s in v))
        hi = max(m + s for v in series.values() for m, s in v)
        y_range = (lo, hi if hi > lo else lo + 1.0)
    y0, y1 = y_range

    def ypos(val):
        val = min(max(val, y0), y1)
        return top + ph * (1.0 - (val - y0) / (y1 - y0))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>']
    for i in range(6):
        val = y0 + (y1 - y0) * i / 5
        y = ypos(val)
        out.append(f'<line x1="{left}" x2="{left + pw}" y1="{y:.1f}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{val:.2f}</text>')
    if y_label:
        out.append(f'<text transform="translate(14,{top + ph / 2:.1f}) rotate(-90)" '
                   f'text-anchor="middle">{escape(y_label)}</text>')
    gw = pw / len(groups)
    bw = gw * 0.8 / len(names)
    base = ypos(max(y0, 0.0))
    for g, label in enumerate(groups):
        gx = left + g * gw + gw * 0.1
        for s, name in enumerate(names):
            mean, std = series[name][g]
            x = gx + s * bw
            y = ypos(mean)
            top_y, h = min(y, base), abs(base - y)
            color = palette[s % len(palette)]
            out.append(f'<rect x="{x:.1f}" y="{top_y:.1f}" width="{bw * 0.92:.1f}" height="{h:.1f}" '
                       f'fill="{color}"><title>{escape(name)} {escape(label)}: '
                       f'{mean:.4f} {PM} {std:.4f}</title></rect>')
            cx = x + bw * 0.46
            out.append(f'<line x1="{cx:.1f}" x2="{cx:.1f}" y1="{ypos(mean - std):.1f}" '
                       f'y2="{ypos(mean + std):.1f}" stroke="black"/>')
        out.append(f'<text x="{left + (g + 0.5) * gw:.1f}" y="{top + ph + 16}" '
                   f'text-anchor="middle">{escape(label)}</text>')
    out.append(f'<line x1="{left}" x2="{left + pw}" y1="{base:.1f}" y2="{base:.1f}" stroke="black"/>')
    for s, name in enumerate(names):
        x = left + s * 90
        out.append(f'<rect x="{x}" y="{height - 22}" width="12" height="12" '
                   f'fill="{palette[s % len(palette)]}"/>')
        out.append(f'<text x="{x + 16}" y="{height - 12}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _y_range(metric):
    return (-1.0, 1.0) if metric == "Rand" else (0.0, 1.0)


def comparison_charts(reports: list[EvalReport]) -> dict[str, str]:
    """SVG text per file name: by-algorithm and by-view charts for every metric.

    By-view charts come in two variants, with and without RMKMC folded into
    each view's average.
    """
    if not reports:
        raise InvalidInput("need at least one report to chart")
    first = reports[0]
    for r in reports[1:]:
        if r.views != first.views or r.algorithms != first.algorithms:
            raise InvalidInput("reports to compare must share views and algorithms")
    out = {}
    names = [r.method for r in reports]
    for metric in METRICS:
        groups, _ = _series_by_algorithm(first, metric)
        series = {}
        for r in reports:
            g, vals = _series_by_algorithm(r, metric)
            if g != groups:
                raise InvalidInput("reports disagree on RMKMC presence")
            series[r.method] = vals
        out[f"by_algorithm_{metric.lower()}.svg"] = bar_chart_svg(
            f"{metric} by algorithm: {' vs '.join(names)}", groups, series, metric, _y_range(metric))
        for suffix, incl in (("", False), ("_with_rmkmc", True)):
            series = {}
            for r in reports:
                groups, series[r.method] = _series_by_view(r, metric, incl)
            note = " (RMKMC included)" if incl else ""
            out[f"by_view_{metric.lower()}{suffix}.svg"] = bar_chart_svg(
                f"{metric} by view{note}: {' vs '.join(names)}", groups, series, metric,
                _y_range(metric))
    return out


def emit_report(report: EvalReport | list[EvalReport], out_dir, formats=FORMATS) -> list[Path]:
    """Write tables, raw dumps and charts; returns the written paths.

    With several reports (for example SMC and UCP), tables and dumps go to
    one subdirectory per method and the charts compare them side by side.
    """
    reports = report if isinstance(report, list) else [report]
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise InvalidInput(f"unknown report formats {sorted(unknown)}")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc
    written = []
    for r in reports:
        target = out_dir / r.method.lower() if len(reports) > 1 else out_dir
        if target != out_dir:
            try:
                target.mkdir(exist_ok=True)
            except OSError as exc:
                raise IoError(f"cannot create {target}: {exc}") from exc
        if "csv" in formats:
            for metric, fname in TABLE_FILES.items():
                _write_text(target / fname, table_csv(r, metric))
                written.append(target / fname)
        if "json" in formats:
            write_json(target / "report.json", r.to_dict())
            written.append(target / "report.json")
    if "svg" in formats:
        for fname, svg in comparison_charts(reports).items():
            _write_text(out_dir / fname, svg)
            written.append(out_dir / fname)
    return written
