"""Bundled experiment presets.

Each sweep preset generates a 50-node preferential-attachment network,
weights it, shifts the diagonal to land in a target definiteness class,
picks a driver set, and sweeps the energy bounds over a log-spaced grid
of control horizons.  The grid adapts to the instance's spectrum so that
the small-horizon window (max|lambda| * tf <= 0.05) holds enough points
to fit and the large-horizon exponents stay within the precision cap.

fig1a-f drive every node across the five definiteness classes (the two
ID panels share a configuration).  fig4a-f use a single driver node and
fig5a-f twenty.  fig2-compare contrasts the trace-moment lower bound
with the prior 1/trace bound on single-driver negative-definite networks
of growing size, and fig2prime measures the eigenvalue estimators on
random positive-definite matrices with pinned smallest eigenvalues.
"""

import csv
import hashlib
import json
import math
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds, netgen, scaling
from .errors import ParameterError
from .gramian import DriverSet
from .spectral import eig_sym

DEFAULT_MASTER_SEED = 2025

ESTIMATOR_CSV_HEADER = "index,true_lambda_min,est_lambda_min,true_lambda_max,est_lambda_max"

GRID_POINTS_PER_DECADE = 6
GRID_TF_LO_DEFAULT = 1e-3
GRID_TF_HI_DEFAULT = 1e2
# keep the largest exponent 2*lambda_n*tf below ~3000 so the precision
# ladder stays within its top rung
GRID_MAX_EXPONENT = 3000.0
# with partial driving and a strictly negative spectrum the smallest
# Gramian eigenvalue is tiny, so its convergence to the infinite-horizon
# constant takes until roughly tf ~ |log mu_min| / (2|lam_n|); stretch
# the grid so the last decade sits past that point
GRID_TF_HI_ND_PARTIAL = 3e2


@dataclass(frozen=True)
class SweepPreset:
    name: str
    n: int
    weight_interval: tuple
    a: float
    drivers: object          # "all" | int count
    edges_per_new_node: int = 3
    description: str = ""


SWEEP_PRESETS = {
    p.name: p
    for p in (
        SweepPreset("fig1a", 50, (0.0, 1.0), -5.0, "all", description="ND, all nodes driven"),
        SweepPreset("fig1b", 50, (0.0, 1.0), 0.0, "all", description="NSD, all nodes driven"),
        SweepPreset("fig1c", 50, (0.0, 1.0), 5.0, "all", description="ID, all nodes driven"),
        SweepPreset("fig1d", 50, (0.0, 1.0), 5.0, "all", description="ID, all nodes driven (companion panel)"),
        SweepPreset("fig1e", 50, (-1.0, 0.0), 0.0, "all", description="PSD, all nodes driven"),
        SweepPreset("fig1f", 50, (-1.0, 0.0), 5.0, "all", description="PD, all nodes driven"),
        SweepPreset("fig4a", 50, (0.0, 1.0), -5.0, 1, description="ND, one driver"),
        SweepPreset("fig4b", 50, (0.0, 1.0), 0.0, 1, description="NSD, one driver"),
        SweepPreset("fig4c", 50, (0.0, 1.0), 5.0, 1, description="ID, one driver"),
        SweepPreset("fig4d", 50, (1.0, 3.0), 5.0, 1, description="ID (heavier weights), one driver"),
        SweepPreset("fig4e", 50, (-1.0, 0.0), 0.0, 1, description="PSD, one driver"),
        SweepPreset("fig4f", 50, (-5.0, -2.0), 3.0, 1, description="PD (smallest eigenvalue 3), one driver"),
        SweepPreset("fig5a", 50, (0.0, 1.0), -5.0, 20, description="ND, 20 drivers"),
        SweepPreset("fig5b", 50, (0.0, 1.0), 0.0, 20, description="NSD, 20 drivers"),
        SweepPreset("fig5c", 50, (0.0, 1.0), 5.0, 20, description="ID, 20 drivers"),
        SweepPreset("fig5d", 50, (0.0, 1.0), 5.0, 20, description="ID, 20 drivers (companion panel)"),
        SweepPreset("fig5e", 50, (-1.0, 0.0), 0.0, 20, description="PSD, 20 drivers"),
        SweepPreset("fig5f", 50, (-1.0, 0.0), 5.0, 20, description="PD, 20 drivers"),
    )
}

COMPARE_PRESET = "fig2-compare"
COMPARE_SIZES = (10, 20, 40)
COMPARE_WEIGHTS = (1.0, 3.0)
COMPARE_A = -2.0

ESTIMATOR_PRESET = "fig2prime"
ESTIMATOR_COUNT = 25
ESTIMATOR_DIM = 25

PRESET_NAMES = tuple(sorted(SWEEP_PRESETS)) + (COMPARE_PRESET, ESTIMATOR_PRESET)


def derive_seeds(master_seed: int, label: str, count: int = 4):
    """Deterministic child seeds for a named preset component."""
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFF, zlib.crc32(label.encode())])
    return [int(x) for x in ss.generate_state(count, dtype=np.uint64)]


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def pick_drivers(spec_drivers, n: int, seed: int) -> DriverSet:
    if spec_drivers == "all":
        return DriverSet.all_nodes(n)
    d = int(spec_drivers)
    if not (1 <= d <= n):
        raise ParameterError(f"driver count {d} out of range for n={n}")
    if d == n:
        return DriverSet.all_nodes(n)
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = sorted(int(i) for i in rng.choice(n, size=d, replace=False))
    return DriverSet(tuple(idx))


def adaptive_tf_grid(lambdas: np.ndarray, all_driven: bool) -> np.ndarray:
    """Log-spaced horizon grid scaled to the instance's spectrum."""
    max_abs = float(np.max(np.abs(lambdas)))
    tf_lo = GRID_TF_LO_DEFAULT
    if max_abs > 0:
        tf_lo = min(tf_lo, scaling.SMALL_WINDOW_PRODUCT / (8.0 * max_abs))
    lam_n = float(lambdas[-1])
    tf_hi = GRID_TF_HI_DEFAULT
    if not all_driven and lam_n > 0:
        tf_hi = min(tf_hi, max(10.0, GRID_MAX_EXPONENT / (2.0 * lam_n)))
    if not all_driven and lam_n < 0:
        tf_hi = GRID_TF_HI_ND_PARTIAL
    points = int(math.ceil(GRID_POINTS_PER_DECADE * math.log10(tf_hi / tf_lo))) + 1
    return np.geomspace(tf_lo, tf_hi, points)


def _sweep_instance(name, n, edges_per_new_node, weight_interval, a, drivers_spec,
                    master_seed, workers):
    """Generate, sweep and analyze one network instance."""
    graph_seed, weight_seed, driver_seed, _ = derive_seeds(master_seed, name)
    graph = netgen.generate_ba(n, edges_per_new_node, graph_seed)
    network = netgen.weight_and_shift(graph, weight_interval, a, weight_seed)
    decomp = eig_sym(network.entries)
    dclass = netgen.classify_eigs(decomp.lambdas)
    drivers = pick_drivers(drivers_spec, n, driver_seed)
    kind = scaling.driver_kind(drivers.d, n)
    grid = adaptive_tf_grid(decomp.lambdas, drivers.d == n)
    records = scaling.sweep(decomp, drivers, grid, workers=workers)
    fits = scaling.analyze_sweep(records, decomp.lambdas, dclass, kind)
    summary = {
        "kind": "sweep",
        "network": {
            "n": n,
            "class": dclass,
            "lambda_min": float(decomp.lambdas[0]),
            "lambda_max": float(decomp.lambdas[-1]),
            "graph_seed": graph_seed,
            "weight_seed": weight_seed,
        },
        "drivers": {"kind": kind, "indices": list(drivers.indices)},
        "tf_grid": {"lo": float(grid[0]), "hi": float(grid[-1]), "points": int(grid.size)},
        "cells_failed": sum(1 for r in records if r.error),
        "overflow_cells": sum(1 for r in records if r.overflow_path),
        "fits": fits,
        "log_series": scaling.records_to_log_series(records),
    }
    return network, records, summary


def _np_default(obj):
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1, default=_np_default)
        fh.write("\n")


def run_sweep_preset(name: str, outdir, master_seed: int = DEFAULT_MASTER_SEED,
                     workers: int = None) -> dict:
    outdir = Path(outdir)
    spec = SWEEP_PRESETS[name]
    cfg = {
        "preset": name,
        "n": spec.n,
        "edges_per_new_node": spec.edges_per_new_node,
        "weight_interval": list(spec.weight_interval),
        "a": spec.a,
        "drivers": spec.drivers,
        "seed": master_seed,
    }
    network, records, summary = _sweep_instance(
        name, spec.n, spec.edges_per_new_node, spec.weight_interval, spec.a,
        spec.drivers, master_seed, workers,
    )
    summary["preset"] = name
    summary["seed"] = master_seed
    summary["config"] = cfg
    summary["config_sha256"] = config_hash(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    netgen.save_network(network, outdir / "network.json")
    scaling.write_csv(records, outdir / "sweep.csv", seed=master_seed,
                      config_hash=summary["config_sha256"], preset=name)
    _write_json(summary, outdir / "summary.json")
    return summary


def run_compare_preset(outdir, master_seed: int = DEFAULT_MASTER_SEED,
                       workers: int = None) -> dict:
    """Single-driver ND networks of growing size; lower-bound tightness."""
    outdir = Path(outdir)
    cfg = {
        "preset": COMPARE_PRESET,
        "sizes": list(COMPARE_SIZES),
        "weight_interval": list(COMPARE_WEIGHTS),
        "a": COMPARE_A,
        "drivers": 1,
        "seed": master_seed,
    }
    chash = config_hash(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    per_size = {}
    total_cells = 0
    tight_cells = 0
    for n in COMPARE_SIZES:
        sub = outdir / f"n{n}"
        sub.mkdir(parents=True, exist_ok=True)
        label = f"{COMPARE_PRESET}-n{n}"
        network, records, summary = _sweep_instance(
            label, n, 3, COMPARE_WEIGHTS, COMPARE_A, 1, master_seed, workers)
        summary["preset"] = label
        summary["seed"] = master_seed
        summary["config"] = dict(cfg, n=n)
        summary["config_sha256"] = chash
        netgen.save_network(network, sub / "network.json")
        scaling.write_csv(records, sub / "sweep.csv", seed=master_seed,
                          config_hash=chash, preset=label)
        _write_json(summary, sub / "summary.json")
        ok = [r for r in records if not r.error]
        total_cells += len(ok)
        tight_cells += sum(
            1 for r in ok
            if r.log_lower_est >= r.log_lower_trace_prior - 1e-12
        )
        per_size[str(n)] = {
            "class": summary["network"]["class"],
            "cells": len(ok),
            "cells_failed": summary["cells_failed"],
        }
    summary = {
        "kind": "compare",
        "preset": COMPARE_PRESET,
        "seed": master_seed,
        "config": cfg,
        "config_sha256": chash,
        "per_size": per_size,
        "cells_total": total_cells,
        "est_ge_prior_fraction": (tight_cells / total_cells) if total_cells else 0.0,
    }
    _write_json(summary, outdir / "summary.json")
    return summary


def _random_spd(n: int, lam_min: float, lam_max: float, seed: int):
    """SPD matrix with pinned extreme eigenvalues, log-uniform interior.

    The interior stays clear of both extremes, the regime the trace
    moments resolve well (Gramian spectra are of this kind).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    interior = np.exp(rng.uniform(math.log(2.0 * lam_min), math.log(0.5 * lam_max), n - 2))
    eigs = np.sort(np.concatenate([[lam_min, lam_max], interior]))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    return (q * eigs) @ q.T, eigs


def run_estimator_preset(outdir, master_seed: int = DEFAULT_MASTER_SEED,
                         workers: int = None) -> dict:
    """Estimator veracity on random SPD matrices with lambda_min = 4i."""
    outdir = Path(outdir)
    cfg = {
        "preset": ESTIMATOR_PRESET,
        "count": ESTIMATOR_COUNT,
        "dim": ESTIMATOR_DIM,
        "seed": master_seed,
    }
    chash = config_hash(cfg)
    seeds = derive_seeds(master_seed, ESTIMATOR_PRESET, ESTIMATOR_COUNT)
    rows = []
    for i in range(1, ESTIMATOR_COUNT + 1):
        lam_min = 4.0 * i
        m, eigs = _random_spd(ESTIMATOR_DIM, lam_min, 5.0 * lam_min, seeds[i - 1])
        rows.append({
            "index": i,
            "true_lambda_min": float(eigs[0]),
            "est_lambda_min": bounds.estimate_lambda_min(m),
            "true_lambda_max": float(eigs[-1]),
            "est_lambda_max": bounds.estimate_lambda_max(m),
        })
    err_min = [abs(r["est_lambda_min"] - r["true_lambda_min"]) / r["true_lambda_min"] for r in rows]
    err_max = [abs(r["est_lambda_max"] - r["true_lambda_max"]) / r["true_lambda_max"] for r in rows]
    true_all = np.array([r["true_lambda_min"] for r in rows] + [r["true_lambda_max"] for r in rows])
    est_all = np.array([r["est_lambda_min"] for r in rows] + [r["est_lambda_max"] for r in rows])
    slope = float(np.sum((true_all - true_all.mean()) * (est_all - est_all.mean()))
                  / np.sum((true_all - true_all.mean()) ** 2))
    summary = {
        "kind": "estimator",
        "preset": ESTIMATOR_PRESET,
        "seed": master_seed,
        "config": cfg,
        "config_sha256": chash,
        "median_rel_err_min": float(np.median(err_min)),
        "median_rel_err_max": float(np.median(err_max)),
        "regression_slope": slope,
        "points": rows,
    }
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "estimates.csv", "w", newline="") as fh:
        fh.write(f"# seed={master_seed}\n")
        fh.write(f"# config_sha256={chash}\n")
        fh.write(f"# preset={ESTIMATOR_PRESET}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ESTIMATOR_CSV_HEADER.split(","))
        for r in rows:
            writer.writerow([
                r["index"],
                scaling.format_float(r["true_lambda_min"]),
                scaling.format_float(r["est_lambda_min"]),
                scaling.format_float(r["true_lambda_max"]),
                scaling.format_float(r["est_lambda_max"]),
            ])
    _write_json(summary, outdir / "summary.json")
    return summary


def run_preset(name: str, outdir, master_seed: int = DEFAULT_MASTER_SEED,
               workers: int = None) -> dict:
    """Run one preset into ``outdir / name``; returns its summary."""
    outdir = Path(outdir)
    if name in SWEEP_PRESETS:
        return run_sweep_preset(name, outdir / name, master_seed, workers)
    if name == COMPARE_PRESET:
        return run_compare_preset(outdir / name, master_seed, workers)
    if name == ESTIMATOR_PRESET:
        return run_estimator_preset(outdir / name, master_seed, workers)
    raise ParameterError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
