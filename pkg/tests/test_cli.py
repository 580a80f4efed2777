import json

import numpy as np
import pytest

from netctrl import cli, netgen, scaling


def run_cli(args, capsys):
    code = cli.main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_and_classify(tmp_path, capsys):
    out = tmp_path / "net.json"
    code, stdout, _ = run_cli(
        ["generate", "--n", 20, "--weights", 0, 1, "--a", -5, "--seed", 3, "--out", out],
        capsys,
    )
    assert code == 0
    info = json.loads(stdout)
    assert info["class"] == "ND"
    net = netgen.load_network(out)
    assert net.n == 20


def test_energy_command(tmp_path, capsys):
    out = tmp_path / "net.json"
    run_cli(["generate", "--n", 5, "--weights", 0, 1, "--a", -2, "--seed", 1,
             "--out", out], capsys)
    xf = ",".join(["1"] + ["0"] * 4)
    code, stdout, _ = run_cli(
        ["energy", "--network", out, "--drivers", "0,2", "--tf", 1.0, "--xf", xf],
        capsys,
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["energy"] > 0
    assert payload["cond"] >= 1.0


def test_energy_rejects_non_unit_without_normalize(tmp_path, capsys):
    out = tmp_path / "net.json"
    run_cli(["generate", "--n", 4, "--weights", 0, 1, "--a", -2, "--seed", 1,
             "--out", out], capsys)
    bad = ",".join(["2"] + ["0"] * 3)
    code, _, err = run_cli(
        ["energy", "--network", out, "--drivers", "all", "--tf", 1.0, "--xf", bad],
        capsys,
    )
    assert code == 1 and "unit" in err
    code, stdout, _ = run_cli(
        ["energy", "--network", out, "--drivers", "all", "--tf", 1.0, "--xf", bad,
         "--normalize"],
        capsys,
    )
    assert code == 0 and json.loads(stdout)["energy"] > 0


def test_bounds_command(tmp_path, capsys):
    out = tmp_path / "net.json"
    run_cli(["generate", "--n", 6, "--weights", 0, 1, "--a", -3, "--seed", 2,
             "--out", out], capsys)
    code, stdout, _ = run_cli(
        ["bounds", "--network", out, "--drivers", "0,1", "--tf", 0.8], capsys)
    assert code == 0
    payload = json.loads(stdout)
    assert payload["lower_exact"] <= payload["upper_exact"]
    assert payload["lower_trace_prior"] <= payload["lower_est"] * (1 + 1e-12)


def test_sweep_with_config_file(tmp_path, capsys):
    cfg = {
        "network": {"n": 8, "edges_per_new_node": 2,
                    "weight_interval": [0.0, 1.0], "a": -2.0, "seed": 5},
        "drivers": "all",
        "tf_grid": {"min": 0.1, "max": 10.0, "points": 8},
        "out": str(tmp_path / "run"),
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    code, stdout, _ = run_cli(["sweep", "--config", cfg_path], capsys)
    assert code == 0
    assert json.loads(stdout)["cells"] == 8
    rows, meta = scaling.read_csv(tmp_path / "run" / "sweep.csv")
    assert len(rows) == 8
    assert meta["seed"] == "5"
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["network"]["class"] == "ND"
    assert (tmp_path / "run" / "network.json").exists()


def test_sweep_flags_override_config(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({
        "network": {"n": 6, "weight_interval": [0.0, 1.0], "a": -2.0, "seed": 1},
        "drivers": "all",
        "tf_grid": {"min": 0.1, "max": 1.0, "points": 4},
        "out": str(tmp_path / "r1"),
    }))
    code, stdout, _ = run_cli(
        ["sweep", "--config", cfg_path, "--tf-points", 6, "--out", tmp_path / "r2"],
        capsys,
    )
    assert code == 0
    assert json.loads(stdout)["cells"] == 6
    assert (tmp_path / "r2" / "sweep.csv").exists()


def test_sweep_config_validation_names_field(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({
        "network": {"n": 6, "weight_interval": [0.0, 1.0], "a": -2.0},
        "drivers": "all",
        "tf_grid": {"min": 0.0, "max": 1.0, "points": 4},
        "out": str(tmp_path / "r"),
    }))
    code, _, err = run_cli(["sweep", "--config", cfg_path], capsys)
    assert code == 1
    assert "tf_grid.min" in err


def test_sweep_requires_drivers(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({
        "network": {"n": 6, "weight_interval": [0.0, 1.0], "a": -2.0},
        "tf_grid": {"min": 0.1, "max": 1.0, "points": 4},
        "out": str(tmp_path / "r"),
    }))
    code, _, err = run_cli(["sweep", "--config", cfg_path], capsys)
    assert code == 1 and "drivers" in err


def test_sweep_deterministic_csv(tmp_path, capsys):
    args = ["sweep", "--n", 6, "--weights", 0, 1, "--a", -2, "--seed", 9,
            "--drivers", "count:2", "--tf-min", 0.1, "--tf-max", 2.0,
            "--tf-points", 5]
    run_cli(args + ["--out", tmp_path / "a"], capsys)
    run_cli(args + ["--out", tmp_path / "b"], capsys)
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()
    assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()


def test_missing_network_file_is_io_error(tmp_path, capsys):
    code, _, err = run_cli(
        ["energy", "--network", tmp_path / "nope.json", "--drivers", "all",
         "--tf", 1.0, "--xf", "1.0"],
        capsys,
    )
    assert code == 2


def test_preset_list(capsys):
    code, stdout, _ = run_cli(["preset", "--list"], capsys)
    assert code == 0
    for name in ("fig1a", "fig4f", "fig5c", "fig2-compare", "fig2prime"):
        assert name in stdout


def test_preset_unknown_name(capsys):
    code, _, err = run_cli(["preset", "fig9z"], capsys)
    assert code == 1 and "unknown" in err


def test_driver_spec_parsing():
    from netctrl.cli import _parse_drivers

    assert _parse_drivers("all", 4, 0).indices == (0, 1, 2, 3)
    assert _parse_drivers("2,0", 4, 0).indices == (0, 2)
    assert _parse_drivers("count:2", 6, 3).d == 2
    with pytest.raises(Exception):
        _parse_drivers("count:x", 4, 0)
    with pytest.raises(Exception):
        _parse_drivers("a,b", 4, 0)
