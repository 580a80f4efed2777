"""Panel construction from a netctrl run directory.

A run directory holds one subdirectory per experiment.  Sweep
experiments carry ``sweep.csv`` + ``summary.json`` (+ ``network.json``),
the comparison preset nests per-size subdirectories, and the estimator
preset writes ``estimates.csv``.  Panels plot the natural log of each
bound so that regimes far beyond float64 range (the CSV shows 0/inf
there; the summary's log series carries the values) render faithfully.

Overlay laws come from the summary's fitted entries and are drawn only
over their fitted windows.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

SWEEP_HEADER = "tf,lower_exact,upper_exact,lower_est,upper_est,lower_trace_prior,cond,overflow_path,error"
ESTIMATOR_HEADER = "index,true_lambda_min,est_lambda_min,true_lambda_max,est_lambda_max"

SERIES_STYLE = {
    "lower_exact": dict(marker="v", color="tab:blue", label="lower bound"),
    "upper_exact": dict(marker="^", color="tab:purple", label="upper bound"),
    "lower_est": dict(marker="o", color="tab:cyan", label="lower estimate"),
    "upper_est": dict(marker="s", color="tab:pink", label="upper estimate"),
    "lower_trace_prior": dict(marker="x", color="tab:gray", label="trace prior"),
}


class SchemaError(ValueError):
    """A CSV does not conform to the expected column schema."""


@dataclass(frozen=True)
class Overlay:
    """One fitted law drawn over its window."""

    series: str
    regime: str
    form: str           # power | exp_decay | constant
    param: float
    intercept: float
    window: tuple       # (tf_lo, tf_hi)

    def log_values(self, tf):
        if self.form == "power":
            return [self.intercept + self.param * math.log(t) for t in tf]
        if self.form == "exp_decay":
            return [self.intercept - self.param * t for t in tf]
        return [self.intercept for _ in tf]


@dataclass
class PanelSpec:
    """One output image: points from a CSV, laws from the summary."""

    csv_path: Path
    out_path: Path
    kind: str = "sweep"              # sweep | compare | scatter
    axes_mode: str = "semilogx"      # semilogx | loglog | linear
    title: str = ""
    series: tuple = ("lower_exact", "upper_exact")
    overlays: list = field(default_factory=list)
    log_series: dict = field(default_factory=dict)


def _check_header(header_line: str, expected: str, path):
    got = header_line.strip()
    if got == expected:
        return
    got_cols = got.split(",")
    want_cols = expected.split(",")
    for i, want in enumerate(want_cols):
        if i >= len(got_cols) or got_cols[i] != want:
            found = got_cols[i] if i < len(got_cols) else "<missing>"
            raise SchemaError(f"{path}: expected column {i} to be {want!r}, found {found!r}")
    raise SchemaError(f"{path}: unexpected extra columns {got_cols[len(want_cols):]}")


def _read_csv_rows(path):
    meta = {}
    lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
            else:
                lines.append(line)
    if not lines:
        raise SchemaError(f"{path}: empty CSV")
    return lines, meta


def parse_sweep_csv(path):
    """Columns of a sweep CSV as lists; floats parsed, comments skipped."""
    lines, meta = _read_csv_rows(path)
    _check_header(lines[0], SWEEP_HEADER, path)
    cols = {name: [] for name in SWEEP_HEADER.split(",")}
    for raw in csv.reader(lines[1:]):
        if not raw:
            continue
        for name, val in zip(cols, raw):
            if name == "error":
                cols[name].append(val)
            elif name == "overflow_path":
                cols[name].append(val == "1")
            else:
                cols[name].append(float(val))
    return cols, meta


def parse_estimator_csv(path):
    lines, meta = _read_csv_rows(path)
    _check_header(lines[0], ESTIMATOR_HEADER, path)
    cols = {name: [] for name in ESTIMATOR_HEADER.split(",")}
    for raw in csv.reader(lines[1:]):
        if not raw:
            continue
        for name, val in zip(cols, raw):
            cols[name].append(float(val))
    return cols, meta


def _load_summary(directory: Path) -> dict:
    with open(directory / "summary.json") as fh:
        return json.load(fh)


def overlays_from_summary(summary: dict, series=("lower_exact", "upper_exact")) -> list:
    out = []
    for name in series:
        for regime, entry in summary.get("fits", {}).get(name, {}).items():
            fitted = entry.get("fitted")
            window = entry.get("window")
            if not fitted or not window:
                continue
            form = entry["form"] if regime == "large_tf" else "power"
            out.append(Overlay(
                series=name,
                regime=regime,
                form=form,
                param=fitted["param"],
                intercept=fitted["intercept"] if form != "constant" else math.log(fitted["param"]),
                window=(window[0], window[1]),
            ))
    return out


def _sweep_panel(directory: Path, out_dir: Path, name: str) -> PanelSpec:
    summary = _load_summary(directory)
    return PanelSpec(
        csv_path=directory / "sweep.csv",
        out_path=out_dir / f"{name}.svg",
        kind="sweep",
        axes_mode="semilogx",
        title=f"{name}: {summary['network']['class']}, "
              f"{summary['drivers']['kind']} driver(s), n={summary['network']['n']}",
        series=("lower_exact", "upper_exact"),
        overlays=overlays_from_summary(summary),
        log_series=summary.get("log_series", {}),
    )


def build_panels(run_dir, out_dir) -> list:
    """One PanelSpec per experiment found under ``run_dir``."""
    run_dir = Path(run_dir)
    out_dir = Path(out_dir)
    panels = []
    for directory in sorted(p for p in run_dir.iterdir() if p.is_dir()):
        summary_path = directory / "summary.json"
        if not summary_path.exists():
            continue
        summary = _load_summary(directory)
        kind = summary.get("kind", "sweep")
        name = directory.name
        if kind == "sweep":
            panels.append(_sweep_panel(directory, out_dir, name))
        elif kind == "compare":
            for sub in sorted(p for p in directory.iterdir() if p.is_dir()):
                sub_summary = _load_summary(sub)
                panels.append(PanelSpec(
                    csv_path=sub / "sweep.csv",
                    out_path=out_dir / f"{name}-{sub.name}.svg",
                    kind="compare",
                    axes_mode="semilogx",
                    title=f"{name} {sub.name}: lower bounds, estimate vs trace prior",
                    series=("lower_exact", "lower_est", "lower_trace_prior"),
                    overlays=[],
                    log_series=sub_summary.get("log_series", {}),
                ))
        elif kind == "estimator":
            panels.append(PanelSpec(
                csv_path=directory / "estimates.csv",
                out_path=out_dir / f"{name}.svg",
                kind="scatter",
                axes_mode="loglog",
                title=f"{name}: estimated vs true extremal eigenvalues",
                series=(),
                overlays=[],
            ))
    return panels
