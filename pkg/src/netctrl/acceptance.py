"""Verification suite: one callable check per acceptance criterion.

Shared by the ``verify`` CLI command and the test suite.  Criteria that
need experiment artifacts read them from a completed preset run; the
rest build their own small instances from seeds derived off the master
seed.  Regime constants are always checked against the generated
instance's own spectrum.
"""

import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds, netgen, presets, scaling
from .errors import ConditioningError, UncontrollableError
from .gramian import (
    DriverSet,
    build_m,
    gramian_quadrature,
    min_energy,
    simulate_trajectory,
)
from .spectral import eig_sym

# presets consumed by the criteria below
CORE_PRESETS = (
    "fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig1f",
    "fig4a", "fig4b", "fig4c", "fig4d", "fig4e", "fig4f",
    "fig5a", "fig5b", "fig5c",
    presets.COMPARE_PRESET, presets.ESTIMATOR_PRESET,
)

SLOPE_BAND = (-1.05, -0.95)
CONST_TOL = 0.05
RATE_TOL = 0.10
STEEP_MAX = -1.5
EST_MEDIAN_ERR = 0.10
EST_SLOPE_BAND = (0.9, 1.1)
TIGHT_FRACTION = 0.99


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    required: str


def _seeds(master_seed: int, label: str, count: int):
    return presets.derive_seeds(master_seed, f"acceptance-{label}", count)


def _instance(n, epn, interval, a, seed_pair):
    graph = netgen.generate_ba(n, epn, seed_pair[0])
    return netgen.weight_and_shift(graph, interval, a, seed_pair[1])


def criterion_1_gramian_oracle(master_seed: int) -> CriterionResult:
    """P M P^T equals the Simpson quadrature of the defining integral."""
    configs = [((0.0, 1.0), -3.0), ((0.0, 1.0), 0.0), ((0.0, 1.0), 2.0), ((-1.0, 0.0), 1.0)]
    worst = 0.0
    t0 = time.monotonic()
    for k in range(20):
        seeds = _seeds(master_seed, f"c1-{k}", 2)
        n = 2 + (k % 9)
        interval, a = configs[k % 4]
        net = _instance(n, min(2, n - 1), interval, a, seeds)
        decomp = eig_sym(net.entries)
        d_choice = (1, 2, n)[k % 3]
        d = min(d_choice, n)
        drivers = DriverSet(tuple(range(d))) if d < n else DriverSet.all_nodes(n)
        tf = 0.3 + 1.7 * (k / 19.0)
        res = build_m(decomp, drivers, tf)
        g_spec = decomp.p @ res.m @ decomp.p.T
        g_quad = gramian_quadrature(net.entries, drivers, tf, steps=4096)
        rel = np.linalg.norm(g_spec - g_quad) / np.linalg.norm(g_quad)
        worst = max(worst, float(rel))
    elapsed = time.monotonic() - t0
    passed = worst <= 1e-6 and elapsed < 10.0
    return CriterionResult(
        1, "Gramian oracle equivalence", passed,
        f"max rel diff {worst:.3e}, {elapsed:.1f} s",
        "<= 1e-6 Frobenius relative, < 10 s",
    )


def criterion_2_control_realization(master_seed: int) -> CriterionResult:
    """Optimal input steers the simulated state onto the target."""
    found = 0
    k = 0
    worst_end = 0.0
    worst_energy = 0.0
    while found < 10 and k < 200:
        seeds = _seeds(master_seed, f"c2-{k}", 3)
        k += 1
        n = 3 + (k % 4)
        net = _instance(n, 2, (0.0, 1.0), -2.5, seeds)
        decomp = eig_sym(net.entries)
        if netgen.classify_eigs(decomp.lambdas) != "ND":
            continue
        res = build_m(decomp, DriverSet((0, 1)), 2.0)
        if res.m_eigs[0] <= 0 or res.cond > 1e8:
            continue
        found += 1
        rng = np.random.Generator(np.random.PCG64(seeds[2]))
        x_f = rng.standard_normal(n)
        x_f /= np.linalg.norm(x_f)
        e_min = min_energy(res, x_f).energy
        try:
            sim = simulate_trajectory(res, x_f, steps=4096, cond_cap=1e8)
        except (ConditioningError, UncontrollableError) as exc:
            return CriterionResult(2, "Control realization", False, str(exc),
                                   "simulation must run at cond <= 1e8")
        worst_end = max(worst_end, float(np.linalg.norm(sim.endpoint - x_f)))
        worst_energy = max(worst_energy, abs(sim.energy - e_min) / e_min)
    passed = found == 10 and worst_end <= 1e-5 and worst_energy <= 1e-4
    return CriterionResult(
        2, "Control realization", passed,
        f"{found} instances, max endpoint err {worst_end:.3e}, max energy rel {worst_energy:.3e}",
        "10 ND instances; endpoint <= 1e-5, energy rel <= 1e-4",
    )


def criterion_3_closed_form_traces(master_seed: int) -> CriterionResult:
    """Direct trace sums equal matrix-power traces for one driver."""
    configs = [((0.0, 1.0), -2.0), ((0.0, 1.0), 0.0), ((0.0, 1.0), 1.0), ((-1.0, 0.0), 0.5)]
    worst = 0.0
    for k in range(20):
        seeds = _seeds(master_seed, f"c3-{k}", 2)
        n = 3 + (k % 6)
        interval, a = configs[k % 4]
        net = _instance(n, 2, interval, a, seeds)
        decomp = eig_sym(net.entries)
        h = k % n
        tf = 0.2 + 1.8 * (k / 19.0)
        pair = bounds.traces_one_driver_closed_form(decomp, h, tf)
        res = build_m(decomp, DriverSet((h,)), tf)
        m2 = res.m @ res.m
        alpha_ref = float(np.trace(m2))
        beta_ref = float(np.trace(m2 @ m2))
        worst = max(worst,
                    abs(pair.alpha - alpha_ref) / alpha_ref,
                    abs(pair.beta - beta_ref) / beta_ref)
    passed = worst <= 1e-10
    return CriterionResult(
        3, "Closed-form traces", passed,
        f"max rel diff {worst:.3e}", "<= 1e-10 relative on 20 one-driver instances",
    )


def criterion_4_estimator_exactness(master_seed: int) -> CriterionResult:
    """Trace-moment estimates are exact for 2x2 diagonal and c*I."""
    worst = 0.0
    for a, b in ((1.0, 2.0), (0.5, 4.0), (3.0, 7.0)):
        m = np.diag([a, b])
        worst = max(worst,
                    abs(bounds.estimate_lambda_max(m) - max(a, b)) / max(a, b),
                    abs(bounds.estimate_lambda_min(m) - min(a, b)) / min(a, b))
        res = _wrap_spd(m)
        exact = bounds.energy_bounds_exact(res)
        est = bounds.energy_bounds_estimated(res)
        worst = max(worst,
                    abs(est.lower - exact.lower) / exact.lower,
                    abs(est.upper - exact.upper) / exact.upper)
    for c, n in ((0.5, 3), (2.0, 10), (9.0, 25)):
        m = c * np.eye(n)
        worst = max(worst,
                    abs(bounds.estimate_lambda_max(m) - c) / c,
                    abs(bounds.estimate_lambda_min(m) - c) / c)
        res = _wrap_spd(m)
        exact = bounds.energy_bounds_exact(res)
        est = bounds.energy_bounds_estimated(res)
        worst = max(worst,
                    abs(est.lower - exact.lower) / exact.lower,
                    abs(est.upper - exact.upper) / exact.upper)
    passed = worst <= 1e-12
    return CriterionResult(
        4, "Estimator exactness (n=2, identity)", passed,
        f"max rel diff {worst:.3e}", "<= 1e-12 relative",
    )


def _wrap_spd(m: np.ndarray):
    """Package an SPD matrix as a Gramian result for the bounds API."""
    from .gramian import GramianResult

    eigs, vecs = np.linalg.eigh(m)
    return GramianResult(m=m, tf=1.0, drivers=DriverSet((0,)),
                         m_eigs=eigs, m_vecs=vecs, decomp=eig_sym(np.zeros_like(m)))


def criterion_5_estimator_quality(summaries) -> CriterionResult:
    s = summaries[presets.ESTIMATOR_PRESET]
    med_min = s["median_rel_err_min"]
    med_max = s["median_rel_err_max"]
    slope = s["regression_slope"]
    passed = (med_min <= EST_MEDIAN_ERR and med_max <= EST_MEDIAN_ERR
              and EST_SLOPE_BAND[0] <= slope <= EST_SLOPE_BAND[1])
    return CriterionResult(
        5, "Estimator quality (random SPD suite)", passed,
        f"median err min/max {med_min:.3f}/{med_max:.3f}, slope {slope:.3f}",
        f"medians <= {EST_MEDIAN_ERR}, slope in {EST_SLOPE_BAND}",
    )


def criterion_6_tightness_vs_prior(summaries) -> CriterionResult:
    s = summaries[presets.COMPARE_PRESET]
    frac = s["est_ge_prior_fraction"]
    passed = frac >= TIGHT_FRACTION and s["cells_total"] > 0
    return CriterionResult(
        6, "Tightness vs trace prior", passed,
        f"estimate >= prior on {frac:.2%} of {s['cells_total']} cells",
        f">= {TIGHT_FRACTION:.0%}",
    )


def _fit_entry(summaries, preset, series, regime):
    return summaries[preset]["fits"][series][regime]


def criterion_7_small_tf_law(summaries) -> CriterionResult:
    names = ("fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig1f",
             "fig4a", "fig4b", "fig4c", "fig5a", "fig5b", "fig5c")
    slopes = {}
    for name in names:
        entry = _fit_entry(summaries, name, "lower_exact", "small_tf")
        slopes[name] = entry["fitted"]["param"] if entry["fitted"] else None
    passed = all(s is not None and SLOPE_BAND[0] <= s <= SLOPE_BAND[1]
                 for s in slopes.values())
    spread = [s for s in slopes.values() if s is not None]
    measured = f"slopes in [{min(spread):.4f}, {max(spread):.4f}]" if spread else "missing fits"
    return CriterionResult(
        7, "Small-horizon lower-bound slope", passed,
        measured, f"every preset slope in [{SLOPE_BAND[0]}, {SLOPE_BAND[1]}]",
    )


def criterion_8_nd_constants(summaries) -> CriterionResult:
    s = summaries["fig1a"]
    lam1 = s["network"]["lambda_min"]
    lamn = s["network"]["lambda_max"]
    lo = _fit_entry(summaries, "fig1a", "lower_exact", "large_tf")
    up = _fit_entry(summaries, "fig1a", "upper_exact", "large_tf")
    ok = lo["fitted"] is not None and up["fitted"] is not None
    if ok:
        lo_err = abs(lo["fitted"]["param"] - 2 * abs(lamn)) / (2 * abs(lamn))
        up_err = abs(up["fitted"]["param"] - 2 * abs(lam1)) / (2 * abs(lam1))
        ok = lo_err <= CONST_TOL and up_err <= CONST_TOL
        measured = f"lower off by {lo_err:.2%}, upper off by {up_err:.2%}"
    else:
        measured = "missing fits"
    return CriterionResult(
        8, "ND large-horizon constants (all nodes driven)", ok,
        measured, f"within {CONST_TOL:.0%} of 2|lam_n| and 2|lam_1|",
    )


def criterion_9_exponential_regimes(summaries) -> CriterionResult:
    checks = []
    for name in ("fig1c", "fig1d"):
        s = summaries[name]
        rate_target = 2.0 * s["network"]["lambda_max"]
        entry = _fit_entry(summaries, name, "lower_exact", "large_tf")
        ok = (entry["fitted"] is not None
              and abs(entry["fitted"]["param"] - rate_target) <= RATE_TOL * rate_target
              and s["overflow_cells"] > 0 and s["cells_failed"] == 0)
        checks.append((name, "lower", entry, rate_target, ok))
    s = summaries["fig1f"]
    rate_target = 2.0 * s["network"]["lambda_min"]
    entry = _fit_entry(summaries, "fig1f", "upper_exact", "large_tf")
    ok = (entry["fitted"] is not None
          and abs(entry["fitted"]["param"] - rate_target) <= RATE_TOL * rate_target
          and s["overflow_cells"] > 0 and s["cells_failed"] == 0)
    checks.append(("fig1f", "upper", entry, rate_target, ok))
    passed = all(c[-1] for c in checks)
    measured = ", ".join(
        f"{name}/{side} rate {entry['fitted']['param']:.3f} vs {tgt:.3f}"
        if entry["fitted"] else f"{name}/{side} missing"
        for name, side, entry, tgt, _ in checks
    )
    return CriterionResult(
        9, "Exponential regimes (log-domain path)", passed,
        measured, f"rates within {RATE_TOL:.0%}; overflow cells engaged without error",
    )


def criterion_10_nsd_power_law(summaries) -> CriterionResult:
    slopes = []
    for series in ("lower_exact", "upper_exact"):
        entry = _fit_entry(summaries, "fig1b", series, "large_tf")
        if entry["form"] == "power" and entry["predicted_param"] == -1.0:
            slopes.append((series, entry["fitted"]["param"] if entry["fitted"] else None))
    passed = bool(slopes) and all(
        s is not None and SLOPE_BAND[0] <= s <= SLOPE_BAND[1] for _, s in slopes
    )
    measured = ", ".join(
        f"{series} slope {s:.4f}" if s is not None else f"{series} missing"
        for series, s in slopes
    ) or "no power-law bounds predicted"
    return CriterionResult(
        10, "NSD large-horizon power law", passed,
        measured, f"slope in [{SLOPE_BAND[0]}, {SLOPE_BAND[1]}] where 1/tf is predicted",
    )


def criterion_11_one_driver_steepness(summaries) -> CriterionResult:
    slopes = {}
    for name in ("fig4d", "fig4e", "fig4f"):
        entry = _fit_entry(summaries, name, "upper_exact", "small_tf")
        slopes[name] = entry["fitted"]["param"] if entry["fitted"] else None
    passed = all(s is not None and s <= STEEP_MAX for s in slopes.values())
    measured = ", ".join(
        f"{k} {v:.2f}" if v is not None else f"{k} missing" for k, v in slopes.items()
    )
    return CriterionResult(
        11, "One-driver small-horizon upper-bound steepness", passed,
        measured, f"slope <= {STEEP_MAX}",
    )


def run_core(outdir, master_seed: int = presets.DEFAULT_MASTER_SEED,
             workers: int = None, progress=None) -> dict:
    """Run every core preset and criteria 1-11; write the summary JSON."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if progress is None:
        progress = lambda msg: print(msg, file=sys.stderr, flush=True)
    summaries = {}
    for name in CORE_PRESETS:
        t0 = time.monotonic()
        summaries[name] = presets.run_preset(name, outdir, master_seed, workers)
        progress(f"  preset {name}: {time.monotonic() - t0:.1f} s")
    rows = [
        criterion_1_gramian_oracle(master_seed),
        criterion_2_control_realization(master_seed),
        criterion_3_closed_form_traces(master_seed),
        criterion_4_estimator_exactness(master_seed),
        criterion_5_estimator_quality(summaries),
        criterion_6_tightness_vs_prior(summaries),
        criterion_7_small_tf_law(summaries),
        criterion_8_nd_constants(summaries),
        criterion_9_exponential_regimes(summaries),
        criterion_10_nsd_power_law(summaries),
        criterion_11_one_driver_steepness(summaries),
    ]
    payload = {
        "seed": master_seed,
        "criteria": [vars(r) for r in rows],
        "presets": summaries,
    }
    summary_path = outdir / "verify_summary.json"
    with open(summary_path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1, default=presets._np_default)
        fh.write("\n")
    digest = hashlib.sha256(summary_path.read_bytes()).hexdigest()
    return {"rows": rows, "summaries": summaries, "summary_path": summary_path,
            "hash": digest}


def run_verify(outdir, master_seed: int = presets.DEFAULT_MASTER_SEED,
               workers: int = None, progress=None) -> list:
    """Full verification: core twice (determinism check) plus criteria 1-11."""
    outdir = Path(outdir)
    if progress is None:
        progress = lambda msg: print(msg, file=sys.stderr, flush=True)
    progress("verification pass 1/2")
    first = run_core(outdir / "run_a", master_seed, workers, progress)
    progress("verification pass 2/2 (determinism)")
    second = run_core(outdir / "run_b", master_seed, workers, progress)
    rows = list(first["rows"])
    rows.append(CriterionResult(
        12, "Determinism of the verification summary",
        first["hash"] == second["hash"],
        f"sha256 {first['hash'][:12]}... vs {second['hash'][:12]}...",
        "identical summary hashes for identical seeds",
    ))
    return rows


def format_table(rows) -> str:
    lines = []
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"[{status}] {r.number:>2}. {r.name}: {r.measured} (required: {r.required})")
    n_pass = sum(1 for r in rows if r.passed)
    lines.append(f"{n_pass}/{len(rows)} criteria passed")
    return "\n".join(lines)
