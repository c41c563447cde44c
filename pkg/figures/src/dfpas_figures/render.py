"""Render sweep CSVs into line plots, one series per scheme grouping.

Rendering is a pure function of the CSV contents: rows are grouped by the
series columns, values averaged per x (seeds collapse into one point), and
confidence shading drawn where the CI column is populated.  Output bytes are
deterministic for fixed inputs.
"""

from __future__ import annotations

import csv
import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import FigureSpec

PNG_METADATA = {"Software": "dfpas-figures"}


def read_table(path) -> list:
    """Rows of an emitted sweep CSV; leading '#' comment lines are skipped."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            lines = [line for line in handle if not line.startswith("#")]
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc
    return list(csv.DictReader(lines))


def _require_columns(rows: list, spec: FigureSpec) -> None:
    if not rows:
        return
    present = set(rows[0])
    needed = [spec.x_column, spec.value_column, *spec.series_columns, *spec.filters]
    if spec.ci_column:
        needed.append(spec.ci_column)
    for column in needed:
        if column not in present:
            raise ValueError(f"column '{column}' not present in CSV "
                             f"(have: {sorted(present)})")


def collect_series(rows: list, spec: FigureSpec) -> dict:
    """Label -> (x, mean value, mean ci or None), sorted by x."""
    filtered = [row for row in rows
                if all(str(row[col]) == str(want) for col, want in spec.filters.items())]
    buckets: dict = {}
    for row in filtered:
        label = " / ".join(str(row[col]) for col in spec.series_columns)
        x = float(row[spec.x_column])
        value = float(row[spec.value_column])
        ci = None
        if spec.ci_column and row.get(spec.ci_column, "") != "":
            ci = float(row[spec.ci_column])
        buckets.setdefault(label, {}).setdefault(x, []).append((value, ci))

    series = {}
    for label, by_x in buckets.items():
        xs = sorted(by_x)
        values = [float(np.mean([v for v, _ in by_x[x]])) for x in xs]
        cis = []
        for x in xs:
            have = [c for _, c in by_x[x] if c is not None]
            cis.append(float(np.mean(have)) if have else None)
        series[label] = (xs, values, cis)
    return series


def build_figure(spec: FigureSpec, rows: list):
    """Assemble the matplotlib figure; separate from disk I/O for testing."""
    _require_columns(rows, spec)
    series = collect_series(rows, spec)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if not series:
        warnings.warn("no data rows to plot; rendering empty axes")
    for label in sorted(series):
        xs, values, cis = series[label]
        line, = ax.plot(xs, values, marker="o", markersize=3.5, label=label)
        if any(c is not None for c in cis):
            lo = [v - (c or 0.0) for v, c in zip(values, cis)]
            hi = [v + (c or 0.0) for v, c in zip(values, cis)]
            ax.fill_between(xs, lo, hi, color=line.get_color(), alpha=0.2, linewidth=0)
    if series:
        ax.legend()
    ax.set_title(spec.title)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig, ax


def render_figure(spec: FigureSpec) -> str:
    """Read the CSV, draw, and write the image; returns the output path."""
    rows = read_table(spec.input_csv)
    fig, _ = build_figure(spec, rows)
    try:
        fig.savefig(spec.output_path, dpi=120, metadata=PNG_METADATA)
    finally:
        plt.close(fig)
    return spec.output_path
