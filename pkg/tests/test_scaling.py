import math

import numpy as np
import pytest

from netctrl import scaling
from netctrl.errors import ContractError, ParameterError
from netctrl.gramian import DriverSet, build_m
from netctrl.spectral import eig_sym

from conftest import make_network


# -- analytic all-driven spectrum -----------------------------------------------


def test_analytic_eigs_piecewise_large_horizon():
    lam = np.array([-1.0, 0.0, 2.0])
    tf = 30.0
    eigs = scaling.n_driver_analytic_eigs(lam, tf)
    assert eigs[0] == pytest.approx(0.5, rel=1e-12)
    assert eigs[1] == pytest.approx(tf, rel=1e-12)
    assert math.log(eigs[2]) == pytest.approx(4 * tf - math.log(4.0), rel=1e-9)


def test_analytic_eigs_all_zero():
    eigs = scaling.n_driver_analytic_eigs(np.zeros(4), 7.0)
    np.testing.assert_allclose(eigs, 7.0)


def test_analytic_eigs_match_build_m(nd_instance):
    _, dec = nd_instance
    res = build_m(dec, DriverSet.all_nodes(dec.n), 1.3)
    analytic = np.sort(scaling.n_driver_analytic_eigs(dec.lambdas, 1.3))
    np.testing.assert_allclose(analytic, res.m_eigs, rtol=1e-10)


def test_analytic_log_eigs_overflow_safe():
    logs = scaling.n_driver_analytic_log_eigs(np.array([5.0]), 100.0)
    assert logs[0] == pytest.approx(1000.0 - math.log(10.0), rel=1e-9)


# -- predicted laws ----------------------------------------------------------------


def test_predict_small_horizon_lower_always_inverse():
    for dclass in ("ND", "NSD", "ID", "PSD", "PD"):
        for drivers in ("one", "d", "n"):
            lower, upper = scaling.predict(dclass, drivers, "small_tf", [-1.0, 1.0])
            assert lower.form == "power" and lower.param == -1.0
            if drivers == "n":
                assert upper.form == "power" and upper.param == -1.0
            else:
                assert upper.form == "power" and upper.param is None


def test_predict_large_horizon_table():
    lam = np.array([-3.0, -0.5])
    lower, upper = scaling.predict("ND", "n", "large_tf", lam)
    assert (lower.form, lower.param) == ("constant", 1.0)   # 2|lam_n|
    assert (upper.form, upper.param) == ("constant", 6.0)   # 2|lam_1|
    lower, upper = scaling.predict("ND", "one", "large_tf", lam)
    assert (lower.form, lower.param) == ("constant", None)
    assert (upper.form, upper.param) == ("constant", None)

    lam = np.array([-2.0, 0.0])
    lower, upper = scaling.predict("NSD", "d", "large_tf", lam)
    assert (lower.form, lower.param) == ("power", -1.0)
    assert (upper.form, upper.param) == ("constant", None)

    lam = np.array([-2.0, 3.0])
    lower, upper = scaling.predict("ID", "n", "large_tf", lam)
    assert (lower.form, lower.param) == ("exp_decay", 6.0)  # 2 lam_n
    assert (upper.form, upper.param) == ("constant", 4.0)   # 2|lam_1|

    lam = np.array([0.0, 3.0])
    lower, upper = scaling.predict("PSD", "one", "large_tf", lam)
    assert (lower.form, lower.param) == ("exp_decay", 6.0)
    assert (upper.form, upper.param) == ("power", -1.0)

    lam = np.array([1.5, 3.0])
    lower, upper = scaling.predict("PD", "d", "large_tf", lam)
    assert (lower.form, lower.param) == ("exp_decay", 6.0)
    assert (upper.form, upper.param) == ("exp_decay", 3.0)  # 2 lam_1


def test_predict_validates():
    with pytest.raises(ParameterError):
        scaling.predict("XX", "n", "large_tf", [1.0])
    with pytest.raises(ParameterError):
        scaling.predict("ND", "none", "large_tf", [1.0])
    with pytest.raises(ParameterError):
        scaling.predict("ND", "n", "mid_tf", [1.0])


# -- sweep ---------------------------------------------------------------------


def test_sweep_scalar_inverse_law():
    records = scaling.sweep(np.array([[0.0]]), DriverSet((0,)), [1.0, 2.0, 4.0])
    assert [r.lower_exact for r in records] == [1.0, 0.5, 0.25]
    assert [r.upper_exact for r in records] == [1.0, 0.5, 0.25]
    assert [r.lower_est for r in records] == [1.0, 0.5, 0.25]
    assert [r.upper_est for r in records] == [1.0, 0.5, 0.25]
    assert all(not r.error for r in records)


def test_sweep_nd_all_driven_flattens():
    net = make_network(12, (0.0, 1.0), -2.0, seed=41, edges_per_new_node=3)
    lam = eig_sym(net.entries).lambdas
    grid = np.geomspace(0.01, 50.0, 24)
    records = scaling.sweep(net, DriverSet.all_nodes(12), grid)
    final = records[-1].lower_exact
    assert final == pytest.approx(2 * abs(lam[-1]), rel=0.05)


def test_sweep_lower_bound_monotone(nd_instance):
    net, _ = nd_instance
    grid = np.geomspace(0.05, 20.0, 15)
    records = scaling.sweep(net, DriverSet((0, 2)), grid)
    logs = [r.log_lower_exact for r in records]
    assert all(b <= a + 1e-9 for a, b in zip(logs, logs[1:]))


def test_sweep_bound_ordering_all_cells(nd_instance):
    net, _ = nd_instance
    records = scaling.sweep(net, DriverSet((0, 1)), np.geomspace(0.01, 10, 12))
    for r in records:
        assert not r.error
        assert r.log_lower_exact <= r.log_upper_exact + 1e-9
        assert r.log_lower_est <= r.log_upper_est + 1e-9
        assert r.log_lower_trace_prior <= r.log_lower_est + 1e-9


def test_sweep_records_uncontrollable_cells():
    # repeated eigenvalues + one driver: rank-deficient Gramian
    records = scaling.sweep(np.eye(3), DriverSet((0,)), [0.5, 1.0])
    assert all("Uncontrollable" in r.error for r in records)
    assert all(math.isnan(r.lower_exact) for r in records)


def test_sweep_grid_validation(nd_instance):
    net, _ = nd_instance
    with pytest.raises(ParameterError):
        scaling.sweep(net, DriverSet((0,)), [])
    with pytest.raises(ParameterError):
        scaling.sweep(net, DriverSet((0,)), [0.0, 1.0])
    with pytest.raises(ParameterError):
        scaling.sweep(net, DriverSet((0,)), [2.0, 1.0])


def test_sweep_parallel_matches_serial(nd_instance):
    net, _ = nd_instance
    grid = np.geomspace(0.1, 5.0, 6)
    serial = scaling.sweep(net, DriverSet((0, 3)), grid, workers=1)
    parallel = scaling.sweep(net, DriverSet((0, 3)), grid, workers=2)
    for a, b in zip(serial, parallel):
        assert vars(a) == vars(b)


# -- fit ------------------------------------------------------------------------


def test_fit_power_exact():
    tf = np.geomspace(0.1, 10, 12)
    res = scaling.fit(tf, 3.0 / tf, "power")
    assert res.param == pytest.approx(-1.0, abs=1e-9)
    assert res.quality == pytest.approx(1.0, abs=1e-12)


def test_fit_exp_decay_exact():
    tf = np.linspace(1.0, 5.0, 9)
    res = scaling.fit(tf, 5.0 * np.exp(-2.0 * tf), "exp_decay")
    assert res.param == pytest.approx(2.0, abs=1e-9)
    assert res.quality == pytest.approx(1.0, abs=1e-12)


def test_fit_constant():
    tf = np.linspace(1, 2, 8)
    vals = np.full(8, 4.0)
    vals[3] = 4.04
    res = scaling.fit(tf, vals, "constant")
    assert res.param == pytest.approx(4.005, rel=1e-6)
    assert res.quality == pytest.approx(0.035 / 4.005, rel=1e-6)


def test_fit_validation():
    with pytest.raises(ContractError):
        scaling.fit([1, 2, 3], [1.0, 2.0, 3.0], "power")  # too few points
    with pytest.raises(ContractError):
        scaling.fit([1, 2, 3, 4], [1.0, -2.0, 3.0, 4.0], "power")
    with pytest.raises(ParameterError):
        scaling.fit([1, 2, 3, 4], [1.0, 2.0, 3.0, 4.0], "cubic")


# -- windows ----------------------------------------------------------------------


def test_small_window_mask():
    tf = np.array([1e-3, 1e-2, 1e-1, 1.0])
    mask = scaling.small_tf_mask(tf, [-5.0, 5.0])
    np.testing.assert_array_equal(mask, [True, True, False, False])


def test_large_window_slides_past_transient():
    tf = np.geomspace(0.01, 100, 40)
    # exponential tail reached only from tf ~ 1
    logv = np.where(tf < 1.0, -np.log(tf), -2.0 * tf)
    mask = scaling.find_large_tf_window(tf, logv, "exp_decay")
    assert mask is not None
    res = scaling.fit_logspace(tf[mask], logv[mask], "exp_decay")
    assert res.param == pytest.approx(2.0, rel=1e-6)


def test_large_window_rejects_unconverged():
    tf = np.geomspace(1.0, 100, 20)
    logv = -np.sqrt(tf)  # neither power nor clean exponential
    assert scaling.find_large_tf_window(tf, logv, "constant") is None


# -- CSV ---------------------------------------------------------------------------


def test_csv_roundtrip(tmp_path, nd_instance):
    net, _ = nd_instance
    records = scaling.sweep(net, DriverSet((0, 1)), np.geomspace(0.1, 2.0, 5))
    path = tmp_path / "sweep.csv"
    scaling.write_csv(records, path, seed=7, config_hash="abc123", preset="demo")
    rows, meta = scaling.read_csv(path)
    assert meta == {"seed": "7", "config_sha256": "abc123", "preset": "demo"}
    assert len(rows) == 5
    for rec, row in zip(records, rows):
        for key in ("tf", "lower_exact", "upper_exact", "lower_est", "upper_est",
                    "lower_trace_prior", "cond"):
            assert row[key] == getattr(rec, key)
        assert row["overflow_path"] == rec.overflow_path
        assert row["error"] == rec.error


def test_csv_header_is_pinned(tmp_path, nd_instance):
    net, _ = nd_instance
    records = scaling.sweep(net, DriverSet((0,)), [1.0])
    path = tmp_path / "sweep.csv"
    scaling.write_csv(records, path, seed=0, config_hash="x")
    lines = path.read_text().splitlines()
    header = next(l for l in lines if not l.startswith("#"))
    assert header == scaling.CSV_HEADER


def test_csv_rewrite_byte_identical(tmp_path, nd_instance):
    net, _ = nd_instance
    records = scaling.sweep(net, DriverSet((0,)), np.geomspace(0.5, 2.0, 4))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    scaling.write_csv(records, p1, seed=3, config_hash="h")
    scaling.write_csv(records, p2, seed=3, config_hash="h")
    assert p1.read_bytes() == p2.read_bytes()


def test_csv_header_mismatch_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("tf,lower\n1.0,2.0\n")
    with pytest.raises(ContractError):
        scaling.read_csv(path)


# -- analyze -----------------------------------------------------------------------


def test_analyze_sweep_nd_all_driven():
    net = make_network(12, (0.0, 1.0), -2.0, seed=41, edges_per_new_node=3)
    dec = eig_sym(net.entries)
    max_abs = float(np.max(np.abs(dec.lambdas)))
    grid = np.geomspace(0.002 / max_abs, 100.0, 40)
    records = scaling.sweep(dec, DriverSet.all_nodes(12), grid)
    fits = scaling.analyze_sweep(records, dec.lambdas, "ND", "n")
    small = fits["lower_exact"]["small_tf"]
    assert small["ok"] and abs(small["fitted"]["param"] + 1.0) <= 0.05
    large = fits["lower_exact"]["large_tf"]
    assert large["ok"]
    assert large["fitted"]["param"] == pytest.approx(2 * abs(dec.lambdas[-1]), rel=0.05)
