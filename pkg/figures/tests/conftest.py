import json
import math
import subprocess
import sys

import pytest

SWEEP_HEADER = "tf,lower_exact,upper_exact,lower_est,upper_est,lower_trace_prior,cond,overflow_path,error"


def write_synthetic_sweep(directory, name="demo", with_fit=True, overflow_tail=False):
    """Handcrafted sweep artifacts following the documented formats."""
    directory.mkdir(parents=True, exist_ok=True)
    tf = [0.1 * 2**k for k in range(8)]
    rows = []
    log_lower, log_upper = [], []
    for t in tf:
        lo, up = 1.0 / t, 4.0 / t
        llo, lup = math.log(lo), math.log(up)
        if overflow_tail and t > 3.0:
            # linear columns saturate; the summary log series keeps the value
            lup = 800.0 * t
            up = math.inf
        rows.append(f"{t:.17g},{lo:.17g},{up:.17g},{lo:.17g},{up:.17g},{lo / 4:.17g},4,0,")
        log_lower.append(llo)
        log_upper.append(lup)
    csv_path = directory / "sweep.csv"
    csv_path.write_text(
        "# seed=1\n# config_sha256=deadbeef\n# preset=demo\n"
        + SWEEP_HEADER + "\n" + "\n".join(rows) + "\n"
    )
    fits = {}
    for series in ("lower_exact", "upper_exact"):
        fits[series] = {
            "small_tf": {
                "form": "power", "predicted_param": -1.0,
                "fitted": ({"param": -1.0, "quality": 1.0, "intercept": 0.0}
                           if with_fit else None),
                "window": [tf[0], tf[3]] if with_fit else None,
                "n_points": 4, "ok": with_fit,
            },
            "large_tf": {
                "form": "power", "predicted_param": -1.0,
                "fitted": None, "window": None, "n_points": 0, "ok": False,
            },
        }
    summary = {
        "kind": "sweep",
        "preset": name,
        "network": {"n": 3, "class": "NSD", "lambda_min": -2.0, "lambda_max": 0.0},
        "drivers": {"kind": "n", "indices": [0, 1, 2]},
        "fits": fits,
        "log_series": {
            "tf": tf,
            "log_lower_exact": log_lower,
            "log_upper_exact": log_upper,
            "log_lower_est": log_lower,
            "log_upper_est": log_upper,
            "log_lower_trace_prior": [x - math.log(4.0) for x in log_lower],
            "log_cond": [math.log(4.0)] * len(tf),
            "overflow_path": [False] * len(tf),
            "error": [""] * len(tf),
        },
    }
    (directory / "summary.json").write_text(json.dumps(summary))
    return csv_path


@pytest.fixture()
def synthetic_run(tmp_path):
    run = tmp_path / "run"
    write_synthetic_sweep(run / "demo")
    return run


@pytest.fixture(scope="session")
def full_preset_run(tmp_path_factory):
    """Every bundled preset, generated through the primary CLI."""
    out = tmp_path_factory.mktemp("presets")
    proc = subprocess.run(
        [sys.executable, "-m", "netctrl.cli", "preset", "--all", "--out", str(out)],
        capture_output=True, text=True, timeout=3600,
    )
    assert proc.returncode == 0, proc.stderr[-2000:]
    return out
