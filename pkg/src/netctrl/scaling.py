"""Scaling laws of the energy bounds versus control horizon.

Encodes the predicted asymptotic forms per definiteness class and driver
count, runs horizon sweeps that record all bound variants per cell, and
fits slopes/rates/constants over deterministic windows to confirm the
predictions.

Regime windows: the small-horizon window is the set of cells with
max|lambda| * tf <= 0.05; the large-horizon window is the last decade of
the grid on which the predicted form fits with r^2 >= 0.99 (max relative
deviation <= 2% for constants), sliding down a quarter decade at a time
when the tail has not reached the asymptote.

Cells are computed in the cheapest representation that holds them:
pure float64 when the spectrum of M is resolvable there, the analytic
per-eigenvalue log form when every node is driven, and the
arbitrary-precision fallback otherwise.  Records always carry natural
logs of every bound next to the linear values, since deep regimes
produce energies beyond float64 range.
"""

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels, bounds, highprec
from .errors import ContractError, NetctrlError, ParameterError
from .gramian import DriverSet, log_f_entry
from .netgen import WeightedNetwork
from .spectral import SpectralDecomposition, eig_sym

OVERFLOW_CAP = _kernels.OVERFLOW_CAP

# max|lambda| * tf at or below this counts as the small-horizon regime
SMALL_WINDOW_PRODUCT = 0.05

# quality gates for the large-horizon window search
LARGE_WINDOW_R2 = 0.99
CONSTANT_MAX_DEV = 0.02
WINDOW_SLIDE_FACTOR = 10.0 ** 0.25

# acceptance tolerances for fitted-vs-predicted laws
POWER_SLOPE_TOL = 0.05
CONSTANT_REL_TOL = 0.05
RATE_REL_TOL = 0.10
STEEP_SLOPE_MAX = -1.5

# m_eigs from float64 eigh are trusted down to this fraction of mu_max
DOUBLE_TRUST_RTOL = 5e-12

MIN_FIT_POINTS = 4

CSV_HEADER = "tf,lower_exact,upper_exact,lower_est,upper_est,lower_trace_prior,cond,overflow_path,error"

BOUND_SERIES = ("lower_exact", "upper_exact", "lower_est", "upper_est")


@dataclass(frozen=True)
class ScalingLaw:
    """Predicted asymptotic form of one bound in one regime.

    ``param`` is None when the constant/exponent is not analytic and must
    be fitted.
    """

    bound: str            # "lower" | "upper"
    regime: str           # "small_tf" | "large_tf"
    dclass: str           # ND | NSD | ID | PSD | PD
    drivers: str          # "one" | "d" | "n"
    form: str             # "power" | "exp_decay" | "constant"
    param: float = None


@dataclass
class SweepRecord:
    """One sweep cell: every bound variant, linear and in natural log."""

    tf: float
    lower_exact: float = math.nan
    upper_exact: float = math.nan
    lower_est: float = math.nan
    upper_est: float = math.nan
    lower_trace_prior: float = math.nan
    cond: float = math.nan
    overflow_path: bool = False
    error: str = ""
    log_lower_exact: float = math.nan
    log_upper_exact: float = math.nan
    log_lower_est: float = math.nan
    log_upper_est: float = math.nan
    log_lower_trace_prior: float = math.nan
    log_cond: float = math.nan


class FitResult(NamedTuple):
    """Fitted parameter with its quality measure.

    power:     param = slope in (ln tf, ln E), quality = r^2
    exp_decay: param = decay rate (positive), quality = r^2
    constant:  param = mean value, quality = max relative deviation
    ``intercept`` is the companion value needed to draw the law
    (ln C for power/exp_decay, ln mean for constant).
    """

    param: float
    quality: float
    intercept: float


def driver_kind(d: int, n: int) -> str:
    return "n" if d == n else ("one" if d == 1 else "d")


# -- analytic spectrum for d = n ---------------------------------------------


def n_driver_analytic_eigs(lambdas: np.ndarray, tf: float) -> np.ndarray:
    """M's eigenvalues when every node is driven, in the order of lambdas.

    Each equals (e^(2 lam tf) - 1)/(2 lam) (tf at lam = 0); values beyond
    float64 range come back as inf.
    """
    return np.array([_safe_exp(log_f_entry(l, l, tf)) for l in lambdas])


def n_driver_analytic_log_eigs(lambdas: np.ndarray, tf: float) -> np.ndarray:
    return np.array([log_f_entry(l, l, tf) for l in lambdas])


# -- predicted laws -----------------------------------------------------------


def predict(dclass: str, drivers: str, regime: str, lambdas) -> tuple:
    """Predicted (lower, upper) scaling laws for one regime.

    Small horizons: the lower bound falls like 1/tf for any driver count;
    the upper bound falls like 1/tf when every node is driven and with a
    much steeper (fitted) power otherwise.  Large horizons follow the
    definiteness class: see the table encoded below.
    """
    if drivers not in ("one", "d", "n"):
        raise ParameterError(f"drivers must be one|d|n, got {drivers!r}")
    if dclass not in ("ND", "NSD", "ID", "PSD", "PD"):
        raise ParameterError(f"unknown definiteness class {dclass!r}")
    lambdas = np.asarray(lambdas, dtype=float)
    lam1, lamn = float(lambdas[0]), float(lambdas[-1])

    def law(bound, form, param):
        return ScalingLaw(bound=bound, regime=regime, dclass=dclass,
                          drivers=drivers, form=form, param=param)

    if regime == "small_tf":
        lower = law("lower", "power", -1.0)
        upper = law("upper", "power", -1.0 if drivers == "n" else None)
        return lower, upper
    if regime != "large_tf":
        raise ParameterError(f"unknown regime {regime!r}")

    if dclass == "ND":
        lower = law("lower", "constant", 2.0 * abs(lamn) if drivers == "n" else None)
    elif dclass == "NSD":
        lower = law("lower", "power", -1.0)
    else:
        lower = law("lower", "exp_decay", 2.0 * lamn)

    if dclass == "PD":
        upper = law("upper", "exp_decay", 2.0 * lam1)
    elif dclass == "PSD":
        upper = law("upper", "power", -1.0)
    else:
        upper = law("upper", "constant", 2.0 * abs(lam1) if drivers == "n" else None)
    return lower, upper


# -- per-cell bound computation ----------------------------------------------


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _fields_from_linear(mu: np.ndarray, tf: float) -> dict:
    """All record fields from a trusted linear-scale ascending spectrum."""
    logs = np.log(mu)
    out = {
        "lower_exact": 1.0 / float(mu[-1]),
        "upper_exact": 1.0 / float(mu[0]),
        "lower_trace_prior": 1.0 / float(np.sum(mu)),
        "log_lower_exact": -float(logs[-1]),
        "log_upper_exact": -float(logs[0]),
        "log_lower_trace_prior": bounds.log_lower_bound_trace_prior(logs),
        "log_cond": float(logs[-1] - logs[0]),
    }
    out["cond"] = _safe_exp(out["log_cond"])
    linear_traces_ok = (
        float(mu[-1]) <= math.exp(bounds.LOG_TRACE_SWITCH)
        and float(mu[0]) >= math.exp(-bounds.LOG_TRACE_SWITCH)
    )
    if linear_traces_ok:
        up = bounds.trace_pair_from_eigs(mu)
        lo = bounds.inverse_trace_pair_from_eigs(mu)
        out["lower_est"] = 1.0 / bounds.f_lam(up.alpha, up.beta, up.n)
        out["upper_est"] = bounds.f_lam(lo.alpha, lo.beta, lo.n)
        out["log_lower_est"] = math.log(out["lower_est"])
        out["log_upper_est"] = math.log(out["upper_est"])
    else:
        est = bounds.log_energy_bounds_estimated(logs, tf)
        out["lower_est"] = est.lower
        out["upper_est"] = est.upper
        out["log_lower_est"] = est.log_lower
        out["log_upper_est"] = est.log_upper
    return out


def _fields_from_logs(logs: np.ndarray, tf: float) -> dict:
    """All record fields from an ascending log-scale spectrum."""
    est = bounds.log_energy_bounds_estimated(logs, tf)
    out = {
        "log_lower_exact": -float(logs[-1]),
        "log_upper_exact": -float(logs[0]),
        "log_lower_est": est.log_lower,
        "log_upper_est": est.log_upper,
        "log_lower_trace_prior": bounds.log_lower_bound_trace_prior(logs),
        "log_cond": float(logs[-1] - logs[0]),
    }
    for key in ("lower_exact", "upper_exact", "lower_est", "upper_est",
                "lower_trace_prior", "cond"):
        out[key] = _safe_exp(out["log_" + key])
    return out


def _compute_cell(lambdas: np.ndarray, p_rows, tf: float) -> dict:
    """Bound fields for one (spectrum, drivers, tf) cell.

    ``p_rows`` is the (d, n) block of driver rows of P, or None when every
    node is driven (analytic diagonal case).
    """
    n = lambdas.size
    xmax = 2.0 * float(lambdas[-1]) * tf
    if p_rows is None:
        overflow = xmax > OVERFLOW_CAP
        if not overflow:
            mu = np.sort(n_driver_analytic_eigs(lambdas, tf))
            fields_ = _fields_from_linear(mu, tf)
        else:
            logs = np.sort(n_driver_analytic_log_eigs(lambdas, tf))
            fields_ = _fields_from_logs(logs, tf)
        fields_["overflow_path"] = overflow
        return fields_

    if xmax <= OVERFLOW_CAP:
        f = _kernels.f_matrix(lambdas, tf)
        q = p_rows.T @ p_rows
        m = q * f
        m = (m + m.T) / 2.0
        mu = np.linalg.eigvalsh(m)
        if float(mu[0]) > DOUBLE_TRUST_RTOL * float(mu[-1]):
            fields_ = _fields_from_linear(mu, tf)
            fields_["overflow_path"] = False
            return fields_

    logs = highprec.log_m_spectrum(lambdas, p_rows, tf)
    fields_ = _fields_from_logs(logs, tf)
    fields_["overflow_path"] = True
    return fields_


def _cell_record(args) -> SweepRecord:
    lambdas, p_rows, tf = args
    rec = SweepRecord(tf=tf)
    try:
        payload = _compute_cell(lambdas, p_rows, tf)
    except NetctrlError as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        return rec
    for key, val in payload.items():
        setattr(rec, key, val)
    if rec.log_lower_exact > rec.log_upper_exact + 1e-9:
        rec.error = "bound ordering violated"
    return rec


def default_workers() -> int:
    raw = os.environ.get("NETCTRL_WORKERS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ParameterError(f"NETCTRL_WORKERS must be an integer, got {raw!r}")
    return 1


def sweep(network, drivers: DriverSet, tf_grid, workers: int = None) -> list:
    """One SweepRecord per horizon; per-cell failures land in the record.

    ``network`` may be a WeightedNetwork, a symmetric matrix, or an
    existing SpectralDecomposition.  Cells are independent; with
    ``workers > 1`` they are computed in a process pool (identical output
    regardless of worker count).
    """
    tf_arr = np.asarray(tf_grid, dtype=float)
    if tf_arr.ndim != 1 or tf_arr.size == 0:
        raise ParameterError("tf_grid must be a non-empty 1-d sequence")
    if not np.all(tf_arr > 0):
        raise ParameterError("tf_grid values must be positive")
    if not np.all(np.diff(tf_arr) > 0):
        raise ParameterError("tf_grid must be strictly ascending")

    if isinstance(network, SpectralDecomposition):
        decomp = network
    else:
        a = network.entries if isinstance(network, WeightedNetwork) else np.asarray(network, dtype=float)
        decomp = eig_sym(a)
    drivers.validate_for(decomp.n)
    p_rows = None
    if drivers.d < decomp.n:
        p_rows = np.ascontiguousarray(decomp.p[list(drivers.indices), :])

    jobs = [(decomp.lambdas, p_rows, float(tf)) for tf in tf_arr]
    if workers is None:
        workers = default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cell_record, jobs))
    return [_cell_record(job) for job in jobs]


# -- fitting -------------------------------------------------------------


def fit(tf, values, model: str) -> FitResult:
    """Least-squares fit of a scaling form to positive samples.

    power:     slope of ln E against ln tf (returned with r^2)
    exp_decay: decay rate from the slope of ln E against tf (positive)
    constant:  mean value, with the max relative deviation as quality
    """
    tf = np.asarray(tf, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise ContractError("fit requires strictly positive values")
    return fit_logspace(tf, np.log(values), model)


def fit_logspace(tf, log_values, model: str) -> FitResult:
    tf = np.asarray(tf, dtype=float)
    logv = np.asarray(log_values, dtype=float)
    if tf.size != logv.size:
        raise ParameterError("tf and values must have equal length")
    if tf.size < MIN_FIT_POINTS:
        raise ContractError(f"fit requires >= {MIN_FIT_POINTS} points, got {tf.size}")
    if not np.all(np.isfinite(logv)):
        raise ContractError("fit requires finite values")

    if model == "power":
        slope, intercept, r2 = _linreg(np.log(tf), logv)
        return FitResult(param=slope, quality=r2, intercept=intercept)
    if model == "exp_decay":
        slope, intercept, r2 = _linreg(tf, logv)
        return FitResult(param=-slope, quality=r2, intercept=intercept)
    if model == "constant":
        log_mean = _log_mean(logv)
        maxdev = float(np.max(np.abs(np.expm1(logv - log_mean))))
        return FitResult(param=_safe_exp(log_mean), quality=maxdev, intercept=log_mean)
    raise ParameterError(f"unknown fit model {model!r}")


def _linreg(x: np.ndarray, y: np.ndarray):
    xm, ym = float(x.mean()), float(y.mean())
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ContractError("degenerate fit: all abscissae equal")
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-300 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def _log_mean(logv: np.ndarray) -> float:
    m = float(np.max(logv))
    return m + math.log(float(np.mean(np.exp(logv - m))))


# -- regime windows and law checking ------------------------------------------


def small_tf_mask(tf_arr: np.ndarray, lambdas) -> np.ndarray:
    max_abs = float(np.max(np.abs(lambdas)))
    if max_abs == 0.0:
        return np.ones_like(tf_arr, dtype=bool)
    return tf_arr * max_abs <= SMALL_WINDOW_PRODUCT


def find_large_tf_window(tf_arr: np.ndarray, logv: np.ndarray, form: str):
    """Latest one-decade window on which ``form`` fits at quality.

    Returns a boolean mask or None.  Slides down in quarter-decade steps,
    never past the grid's log midpoint.
    """
    finite = np.isfinite(logv)
    hi_edge = float(tf_arr[-1])
    floor = math.sqrt(float(tf_arr[0]) * float(tf_arr[-1]))
    while hi_edge / 10.0 >= floor * (1.0 - 1e-12):
        mask = (tf_arr >= hi_edge / 10.0) & (tf_arr <= hi_edge * (1.0 + 1e-12)) & finite
        if int(mask.sum()) >= MIN_FIT_POINTS:
            res = fit_logspace(tf_arr[mask], logv[mask], form)
            good = res.quality <= CONSTANT_MAX_DEV if form == "constant" else res.quality >= LARGE_WINDOW_R2
            if good:
                return mask
        hi_edge /= WINDOW_SLIDE_FACTOR
    return None


def check_fit_against_law(law: ScalingLaw, res: FitResult) -> dict:
    """Compare a fitted parameter against its predicted form."""
    if law.form == "power":
        if law.param is None:
            ok = res.param <= STEEP_SLOPE_MAX
            target = f"slope <= {STEEP_SLOPE_MAX}"
        else:
            ok = abs(res.param - law.param) <= POWER_SLOPE_TOL
            target = f"slope = {law.param} +- {POWER_SLOPE_TOL}"
    elif law.form == "exp_decay":
        if law.param is None:
            ok = res.quality >= LARGE_WINDOW_R2
            target = f"r^2 >= {LARGE_WINDOW_R2}"
        else:
            ok = abs(res.param - law.param) <= RATE_REL_TOL * abs(law.param)
            target = f"rate = {law.param:.6g} +- {RATE_REL_TOL:.0%}"
    elif law.form == "constant":
        ok = res.quality <= CONSTANT_MAX_DEV
        target = f"max deviation <= {CONSTANT_MAX_DEV:.0%}"
        if law.param is not None:
            ok = ok and abs(res.param - law.param) <= CONSTANT_REL_TOL * abs(law.param)
            target += f", value = {law.param:.6g} +- {CONSTANT_REL_TOL:.0%}"
    else:
        raise ParameterError(f"unknown law form {law.form!r}")
    return {"ok": bool(ok), "measured": res.param, "quality": res.quality, "target": target}


def analyze_sweep(records, lambdas, dclass: str, drivers: str) -> dict:
    """Fit every bound series in both regimes against the predicted laws."""
    tf_arr = np.array([r.tf for r in records])
    lambdas = np.asarray(lambdas, dtype=float)
    out = {}
    for series in BOUND_SERIES:
        bound = "lower" if series.startswith("lower") else "upper"
        logv = np.array([getattr(r, "log_" + series) for r in records])
        series_out = {}
        for regime in ("small_tf", "large_tf"):
            lower_law, upper_law = predict(dclass, drivers, regime, lambdas)
            law = lower_law if bound == "lower" else upper_law
            entry = {
                "form": law.form,
                "predicted_param": law.param,
                "fitted": None,
                "window": None,
                "n_points": 0,
                "ok": False,
            }
            if regime == "small_tf":
                mask = small_tf_mask(tf_arr, lambdas) & np.isfinite(logv)
                fit_form = "power"
            else:
                mask = find_large_tf_window(tf_arr, logv, law.form)
                fit_form = law.form
            if mask is not None and int(np.sum(mask)) >= MIN_FIT_POINTS:
                res = fit_logspace(tf_arr[mask], logv[mask], fit_form)
                entry["fitted"] = {
                    "param": res.param,
                    "quality": res.quality,
                    "intercept": res.intercept,
                }
                entry["window"] = [float(tf_arr[mask][0]), float(tf_arr[mask][-1])]
                entry["n_points"] = int(np.sum(mask))
                entry.update(check_fit_against_law(law, res))
            series_out[regime] = entry
        out[series] = series_out
    return out


# -- CSV ---------------------------------------------------------------------


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_csv(records, path, seed: int, config_hash: str, preset: str = None) -> None:
    """Sweep CSV: comment lines carrying provenance, then the fixed header."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# seed={seed}\n")
        fh.write(f"# config_sha256={config_hash}\n")
        if preset:
            fh.write(f"# preset={preset}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for r in records:
            writer.writerow([
                format_float(r.tf),
                format_float(r.lower_exact),
                format_float(r.upper_exact),
                format_float(r.lower_est),
                format_float(r.upper_est),
                format_float(r.lower_trace_prior),
                format_float(r.cond),
                "1" if r.overflow_path else "0",
                r.error,
            ])


def read_csv(path):
    """Parse a sweep CSV back into (rows, meta); validates the header."""
    meta = {}
    rows = []
    with open(path, newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
            else:
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    if header != CSV_HEADER.split(","):
        raise ContractError(f"CSV header mismatch: {','.join(header)!r}")
    for raw in reader:
        if not raw:
            continue
        rows.append({
            "tf": float(raw[0]),
            "lower_exact": float(raw[1]),
            "upper_exact": float(raw[2]),
            "lower_est": float(raw[3]),
            "upper_est": float(raw[4]),
            "lower_trace_prior": float(raw[5]),
            "cond": float(raw[6]),
            "overflow_path": raw[7] == "1",
            "error": raw[8],
        })
    return rows, meta


def records_to_log_series(records) -> dict:
    """Log-domain series for the summary (covers values beyond float64)."""
    out = {"tf": [r.tf for r in records]}
    for name in ("log_lower_exact", "log_upper_exact", "log_lower_est",
                 "log_upper_est", "log_lower_trace_prior", "log_cond"):
        out[name] = [getattr(r, name) for r in records]
    out["overflow_path"] = [bool(r.overflow_path) for r in records]
    out["error"] = [r.error for r in records]
    return out
