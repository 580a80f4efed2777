"""Matplotlib rendering of panel specs.

Sweep and comparison panels plot ln(E) on a linear axis against the
horizon on a log axis, so values hundreds of orders of magnitude beyond
float64 range (taken from the summary's log series when the CSV shows
0/inf) sit on the same panel as ordinary ones.  Numeric cells appear as
markers, fitted laws as full lines over their windows only.  Rendering
never writes anything into the run directory.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .panels import SERIES_STYLE, PanelSpec, parse_estimator_csv, parse_sweep_csv


@dataclass(frozen=True)
class RenderReport:
    out_path: Path
    n_points: int
    overlay_windows: list    # [(series, regime, (lo, hi)), ...]


def _log_points(cols, panel: PanelSpec, series: str):
    """ln(E) per cell: CSV value where finite, else the summary log series."""
    tf = cols["tf"]
    linear = cols[series]
    fallback = panel.log_series.get("log_" + series)
    out_tf, out_log = [], []
    for i, (t, v) in enumerate(zip(tf, linear)):
        if cols["error"][i]:
            continue
        if v > 0 and math.isfinite(v):
            out_tf.append(t)
            out_log.append(math.log(v))
        elif fallback is not None and i < len(fallback) and fallback[i] is not None:
            lv = fallback[i]
            if isinstance(lv, float) and math.isfinite(lv):
                out_tf.append(t)
                out_log.append(lv)
    return out_tf, out_log


def _render_sweep(panel: PanelSpec, ax):
    cols, _ = parse_sweep_csv(panel.csv_path)
    n_points = 0
    for series in panel.series:
        tf, logs = _log_points(cols, panel, series)
        style = SERIES_STYLE.get(series, {})
        ax.plot(tf, logs, linestyle="none", markersize=4,
                markerfacecolor="none", **style)
        n_points += len(tf)
    windows = []
    for ov in panel.overlays:
        lo, hi = ov.window
        tf_line = np.geomspace(lo, hi, 64)
        ax.plot(tf_line, ov.log_values(tf_line), "-", linewidth=1.6,
                color=SERIES_STYLE.get(ov.series, {}).get("color", "black"),
                alpha=0.9)
        windows.append((ov.series, ov.regime, (lo, hi)))
    ax.set_xscale("log")
    ax.set_xlabel("control horizon tf")
    ax.set_ylabel("ln E")
    ax.legend(loc="best", fontsize=8)
    return n_points, windows


def _render_scatter(panel: PanelSpec, ax):
    cols, _ = parse_estimator_csv(panel.csv_path)
    true_all = cols["true_lambda_min"] + cols["true_lambda_max"]
    est_all = cols["est_lambda_min"] + cols["est_lambda_max"]
    ax.plot(cols["true_lambda_min"], cols["est_lambda_min"], "o",
            markerfacecolor="none", color="tab:blue", label="smallest eigenvalue")
    ax.plot(cols["true_lambda_max"], cols["est_lambda_max"], "s",
            markerfacecolor="none", color="tab:red", label="largest eigenvalue")
    lo, hi = min(true_all), max(true_all)
    ax.plot([lo, hi], [lo, hi], "-", color="gray", linewidth=1.0, label="y = x")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("true eigenvalue")
    ax.set_ylabel("estimated eigenvalue")
    ax.legend(loc="best", fontsize=8)
    return len(true_all), []


def render(panels) -> list:
    """Write one image per panel; returns a report per panel."""
    reports = []
    for panel in panels:
        panel.out_path.parent.mkdir(parents=True, exist_ok=True)
        fig, ax = plt.subplots(figsize=(5.2, 3.9))
        try:
            if panel.kind == "scatter":
                n_points, windows = _render_scatter(panel, ax)
            else:
                n_points, windows = _render_sweep(panel, ax)
            ax.set_title(panel.title, fontsize=9)
            fig.tight_layout()
            fig.savefig(panel.out_path)
        finally:
            plt.close(fig)
        reports.append(RenderReport(out_path=panel.out_path, n_points=n_points,
                                    overlay_windows=windows))
    return reports
