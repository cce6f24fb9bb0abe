"""Experiment reports and their CSV / SVG serializations.

CSV layout: an optional ``# key=value`` comment line carrying the seed,
then a header ``experiment,<parameter columns>,value,fit_slope,fit_residual,pass``
and one line per row in insertion order.  Floats are written with 17
significant digits, which round-trips every double exactly.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["ExperimentReport", "format_value", "emit_csv", "read_csv", "emit_svg"]

FIXED_TAIL = ("value", "fit_slope", "fit_residual", "pass")


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


@dataclass
class ExperimentReport:
    """Rows of ``(experiment, parameters) -> value`` with fits and pass flags."""

    seed: int | None = None
    rows: list = field(default_factory=list)

    def add(self, experiment: str, params: dict, value, fit_slope=None, fit_residual=None, passed=None):
        self.rows.append({
            "experiment": experiment,
            "params": dict(params),
            "value": value,
            "fit_slope": fit_slope,
            "fit_residual": fit_residual,
            "pass": passed,
        })

    def extend(self, other: "ExperimentReport"):
        self.rows.extend(other.rows)

    def param_names(self) -> list:
        names = []
        for r in self.rows:
            for k in r["params"]:
                if k not in names:
                    names.append(k)
        return names

    def failures(self) -> list:
        return [r for r in self.rows if r["pass"] is False]

    @property
    def all_passed(self) -> bool:
        return not self.failures()

    def header(self) -> list:
        return ["experiment", *self.param_names(), *FIXED_TAIL]

    def table(self) -> list:
        names = self.param_names()
        out = []
        for r in self.rows:
            out.append([r["experiment"], *(format_value(r["params"].get(n)) for n in names),
                        *(format_value(r[c]) for c in FIXED_TAIL)])
        return out

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        if self.seed is not None:
            buf.write(f"# seed={self.seed}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        w.writerows(self.table())
        return buf.getvalue()


def emit_csv(report: ExperimentReport, path) -> Path:
    """Write ``report`` to ``path`` (raises ``OSError`` if unwritable)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(report.to_csv_text())
    return path


def read_csv(path):
    """Parse a report file into ``(comments, header, rows)``; rows are lists of strings."""
    comments, lines = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            (comments if line.startswith("#") else lines).append(line)
    rows = list(csv.reader(lines))
    return [c.strip() for c in comments], (rows[0] if rows else []), rows[1:]


def _svg_num(v: float) -> str:
    return format(v, ".2f")


def emit_svg(report: ExperimentReport, path, x_param: str, title: str = "", experiment: str | None = None,
             width: int = 480, height: int = 360):
    """Log-log scatter of ``value`` against ``x_param`` with a least-squares line.

    Only rows of ``experiment`` (if given) with positive ``x`` and ``value``
    are drawn.  Fewer than two usable rows: nothing is written, a warning
    is issued and ``None`` returned.
    """
    pts = []
    for r in report.rows:
        if experiment is not None and r["experiment"] != experiment:
            continue
        x, y = r["params"].get(x_param), r["value"]
        try:
            x, y = float(x), float(y)
        except (TypeError, ValueError):
            continue
        if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y):
            pts.append((x, y))
    if len(pts) < 2:
        warnings.warn("emit_svg: fewer than two plottable rows, skipping", RuntimeWarning, stacklevel=2)
        return None
    lx = np.log10([p[0] for p in pts])
    ly = np.log10([p[1] for p in pts])
    slope, icpt = np.polyfit(lx, ly, 1)
    pad = 48
    x0, x1 = float(lx.min()), float(lx.max())
    y0, y1 = float(ly.min()), float(ly.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(u):
        return pad + (u - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle" font-size="12">'
        f'log10 {x_param}</text>',
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.0f})">log10 value</text>',
    ]
    for u, v in zip(lx, ly):
        parts.append(f'<circle cx="{_svg_num(px(u))}" cy="{_svg_num(py(v))}" r="3" fill="steelblue"/>')
    parts.append(
        f'<line x1="{_svg_num(px(x0))}" y1="{_svg_num(py(icpt + slope * x0))}" '
        f'x2="{_svg_num(px(x1))}" y2="{_svg_num(py(icpt + slope * x1))}" stroke="firebrick"/>'
    )
    parts.append(f'<text x="{width - pad}" y="{pad - 8}" text-anchor="end" font-size="12">'
                 f'slope {slope:.3f}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
