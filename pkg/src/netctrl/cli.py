"""Command-line interface.

Subcommands: ``generate`` (network JSON), ``energy`` (minimum energy for
a target state), ``bounds`` (all bound variants at one horizon),
``sweep`` (config-driven horizon sweep producing CSV + summary),
``preset`` (bundled experiment configurations), ``verify`` (acceptance
criteria).  Configuration comes from a JSON file, flags, or both; flags
override the file.  ``NETCTRL_WORKERS`` sets the worker-process count.

Exit codes: 0 success, 1 criterion or configuration failure, 2 I/O failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, netgen, presets, scaling
from . import bounds as bounds_mod
from .errors import ConfigError, NetctrlError
from .gramian import DriverSet, build_network_gramian, min_energy


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NetctrlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="netctrl",
        description="Bounds on the minimum energy for controlling linear network dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a weighted network JSON")
    g.add_argument("--n", type=int, required=True, help="node count")
    g.add_argument("--edges-per-new-node", type=int, default=3)
    g.add_argument("--weights", type=float, nargs=2, metavar=("LO", "HI"), required=True)
    g.add_argument("--a", type=float, required=True, help="diagonal offset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True)
    g.set_defaults(func=_cmd_generate)

    e = sub.add_parser("energy", help="minimum energy to reach a unit target")
    _add_instance_args(e)
    e.add_argument("--xf", type=str, help="comma-separated target state")
    e.add_argument("--xf-file", type=Path, help="JSON file with the target state")
    e.add_argument("--normalize", action="store_true", help="normalize the target first")
    e.set_defaults(func=_cmd_energy)

    b = sub.add_parser("bounds", help="energy bounds at one horizon")
    _add_instance_args(b)
    b.set_defaults(func=_cmd_bounds)

    s = sub.add_parser("sweep", help="horizon sweep from a config file and/or flags")
    s.add_argument("--config", type=Path, help="JSON experiment config")
    s.add_argument("--network", type=Path, help="network JSON (overrides config)")
    s.add_argument("--n", type=int)
    s.add_argument("--edges-per-new-node", type=int)
    s.add_argument("--weights", type=float, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--a", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--drivers", type=str, help='"all", "i,j,k", or "count:D"')
    s.add_argument("--tf-min", type=float)
    s.add_argument("--tf-max", type=float)
    s.add_argument("--tf-points", type=int)
    s.add_argument("--out", type=Path)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("preset", help="run a bundled experiment preset")
    p.add_argument("name", nargs="?", help="preset name")
    p.add_argument("--list", action="store_true", help="list available presets")
    p.add_argument("--all", action="store_true", help="run every preset")
    p.add_argument("--out", type=Path, default=Path("runs"))
    p.add_argument("--seed", type=int, default=presets.DEFAULT_MASTER_SEED)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_preset)

    v = sub.add_parser("verify", help="run the acceptance criteria")
    v.add_argument("--out", type=Path, default=Path("verify"))
    v.add_argument("--seed", type=int, default=presets.DEFAULT_MASTER_SEED)
    v.add_argument("--workers", type=int)
    v.set_defaults(func=_cmd_verify)
    return parser


def _add_instance_args(sp):
    sp.add_argument("--network", type=Path, required=True, help="network JSON")
    sp.add_argument("--drivers", type=str, required=True, help='"all", "i,j,k", or "count:D"')
    sp.add_argument("--driver-seed", type=int, default=0, help='seed for "count:D" driver choice')
    sp.add_argument("--tf", type=float, required=True, help="control horizon")


def _parse_drivers(spec: str, n: int, seed: int) -> DriverSet:
    spec = spec.strip()
    if spec == "all":
        return DriverSet.all_nodes(n)
    if spec.startswith("count:"):
        try:
            count = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"drivers: bad count in {spec!r}")
        return presets.pick_drivers(count, n, seed)
    try:
        idx = tuple(sorted({int(tok) for tok in spec.split(",") if tok.strip() != ""}))
    except ValueError:
        raise ConfigError(f"drivers: cannot parse {spec!r}")
    if not idx:
        raise ConfigError("drivers: empty list")
    return DriverSet(idx)


def _cmd_generate(args) -> int:
    graph = netgen.generate_ba(args.n, args.edges_per_new_node, args.seed)
    net = netgen.weight_and_shift(graph, tuple(args.weights), args.a, args.seed + 1)
    netgen.save_network(net, args.out)
    cls = netgen.classify(net)
    print(json.dumps({"n": net.n, "class": cls.label, "out": str(args.out)}))
    return 0


def _load_instance(args):
    net = netgen.load_network(args.network)
    drivers = _parse_drivers(args.drivers, net.n, args.driver_seed)
    return net, drivers


def _cmd_energy(args) -> int:
    net, drivers = _load_instance(args)
    if (args.xf is None) == (args.xf_file is None):
        raise ConfigError("energy: provide exactly one of --xf / --xf-file")
    if args.xf is not None:
        x_f = np.array([float(t) for t in args.xf.split(",")])
    else:
        with open(args.xf_file) as fh:
            x_f = np.asarray(json.load(fh), dtype=float)
    if x_f.size != net.n:
        raise ConfigError(f"energy: target has length {x_f.size}, expected n={net.n}")
    if args.normalize:
        x_f = x_f / np.linalg.norm(x_f)
    res = build_network_gramian(net, drivers, args.tf)
    out = min_energy(res, x_f)
    print(json.dumps({"energy": out.energy, "cond": out.cond, "tf": args.tf}))
    return 0


def _cmd_bounds(args) -> int:
    net, drivers = _load_instance(args)
    records = scaling.sweep(net, drivers, [args.tf])
    r = records[0]
    if r.error:
        print(f"error: {r.error}", file=sys.stderr)
        return 1
    print(json.dumps({
        "tf": r.tf,
        "lower_exact": r.lower_exact,
        "upper_exact": r.upper_exact,
        "lower_est": r.lower_est,
        "upper_est": r.upper_est,
        "lower_trace_prior": r.lower_trace_prior,
        "cond": r.cond,
        "overflow_path": r.overflow_path,
        "log_lower_exact": r.log_lower_exact,
        "log_upper_exact": r.log_upper_exact,
        "log_lower_est": r.log_lower_est,
        "log_upper_est": r.log_upper_est,
        "log_lower_trace_prior": r.log_lower_trace_prior,
        "log_cond": r.log_cond,
    }))
    return 0


# -- config-driven sweep -------------------------------------------------------


def _merge_config(args) -> dict:
    cfg = {}
    if args.config is not None:
        with open(args.config) as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config: invalid JSON ({exc})")
        if not isinstance(cfg, dict):
            raise ConfigError("config: top level must be an object")
    network = dict(cfg.get("network") or {})
    if args.network is not None:
        network = {"path": str(args.network)}
    for key, val in (("n", args.n), ("edges_per_new_node", args.edges_per_new_node),
                     ("a", args.a), ("seed", args.seed)):
        if val is not None:
            network[key] = val
    if args.weights is not None:
        network["weight_interval"] = list(args.weights)
    cfg["network"] = network
    if args.drivers is not None:
        cfg["drivers"] = args.drivers
    grid = dict(cfg.get("tf_grid") or {})
    for key, val in (("min", args.tf_min), ("max", args.tf_max), ("points", args.tf_points)):
        if val is not None:
            grid[key] = val
    cfg["tf_grid"] = grid
    if args.out is not None:
        cfg["out"] = str(args.out)
    return cfg


def _validate_sweep_config(cfg: dict):
    network = cfg.get("network") or {}
    if "path" not in network:
        for field_ in ("n", "weight_interval", "a"):
            if field_ not in network:
                raise ConfigError(f"network.{field_}: required when no network path is given")
        if int(network["n"]) < 2:
            raise ConfigError("network.n: must be >= 2")
        wi = network["weight_interval"]
        if len(wi) != 2 or float(wi[0]) > float(wi[1]):
            raise ConfigError("network.weight_interval: need [lo, hi] with lo <= hi")
    drivers = cfg.get("drivers")
    if drivers is None:
        raise ConfigError("drivers: required")
    grid = cfg.get("tf_grid") or {}
    for field_ in ("min", "max", "points"):
        if field_ not in grid:
            raise ConfigError(f"tf_grid.{field_}: required")
    if not (0 < float(grid["min"]) < float(grid["max"])):
        raise ConfigError("tf_grid.min/max: need 0 < min < max")
    if int(grid["points"]) < 2:
        raise ConfigError("tf_grid.points: must be >= 2")
    if "out" not in cfg:
        raise ConfigError("out: required")


def _cmd_sweep(args) -> int:
    cfg = _merge_config(args)
    _validate_sweep_config(cfg)
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)

    network_cfg = cfg["network"]
    seed = int(network_cfg.get("seed", 0))
    if "path" in network_cfg:
        net = netgen.load_network(network_cfg["path"])
    else:
        seeds = presets.derive_seeds(seed, "cli-sweep")
        graph = netgen.generate_ba(int(network_cfg["n"]),
                                   int(network_cfg.get("edges_per_new_node", 3)),
                                   seeds[0])
        net = netgen.weight_and_shift(graph, network_cfg["weight_interval"],
                                      float(network_cfg["a"]), seeds[1])
    drv_spec = cfg["drivers"]
    drv_seed = presets.derive_seeds(seed, "cli-drivers")[0]
    if isinstance(drv_spec, list):
        drivers = DriverSet(tuple(sorted(int(i) for i in drv_spec)))
    elif isinstance(drv_spec, dict):
        drivers = presets.pick_drivers(int(drv_spec["count"]), net.n,
                                       int(drv_spec.get("seed", drv_seed)))
    else:
        drivers = _parse_drivers(str(drv_spec), net.n, drv_seed)

    grid_cfg = cfg["tf_grid"]
    grid = np.geomspace(float(grid_cfg["min"]), float(grid_cfg["max"]),
                        int(grid_cfg["points"]))
    workers = args.workers
    records = scaling.sweep(net, drivers, grid, workers=workers)

    decomp_lambdas = np.linalg.eigvalsh(net.entries)
    dclass = netgen.classify_eigs(decomp_lambdas)
    kind = scaling.driver_kind(drivers.d, net.n)
    fits = scaling.analyze_sweep(records, decomp_lambdas, dclass, kind)
    # the recorded config identifies the experiment, not where its files land
    exp_cfg = {k: v for k, v in cfg.items() if k != "out"}
    chash = presets.config_hash(exp_cfg)
    summary = {
        "kind": "sweep",
        "config": exp_cfg,
        "config_sha256": chash,
        "seed": seed,
        "network": {
            "n": net.n,
            "class": dclass,
            "lambda_min": float(decomp_lambdas[0]),
            "lambda_max": float(decomp_lambdas[-1]),
        },
        "drivers": {"kind": kind, "indices": list(drivers.indices)},
        "tf_grid": {"lo": float(grid[0]), "hi": float(grid[-1]), "points": int(grid.size)},
        "cells_failed": sum(1 for r in records if r.error),
        "overflow_cells": sum(1 for r in records if r.overflow_path),
        "fits": fits,
        "log_series": scaling.records_to_log_series(records),
    }
    netgen.save_network(net, outdir / "network.json")
    scaling.write_csv(records, outdir / "sweep.csv", seed=seed, config_hash=chash)
    presets._write_json(summary, outdir / "summary.json")
    failed = summary["cells_failed"]
    print(json.dumps({"out": str(outdir), "cells": len(records), "cells_failed": failed}))
    return 0 if failed <= 0.1 * len(records) else 1


def _cmd_preset(args) -> int:
    if args.list:
        for name in presets.PRESET_NAMES:
            desc = ""
            if name in presets.SWEEP_PRESETS:
                desc = presets.SWEEP_PRESETS[name].description
            elif name == presets.COMPARE_PRESET:
                desc = "lower-bound tightness vs trace prior, growing sizes"
            elif name == presets.ESTIMATOR_PRESET:
                desc = "eigenvalue-estimate veracity on random SPD matrices"
            print(f"{name:14s} {desc}")
        return 0
    names = list(presets.PRESET_NAMES) if args.all else ([args.name] if args.name else [])
    if not names:
        raise ConfigError("preset: give a name, --all, or --list")
    for name in names:
        if name not in presets.PRESET_NAMES:
            raise ConfigError(f"preset: unknown name {name!r}")
        summary = presets.run_preset(name, args.out, args.seed, args.workers)
        line = {"preset": name, "out": str(Path(args.out) / name)}
        if summary.get("cells_failed"):
            line["cells_failed"] = summary["cells_failed"]
        print(json.dumps(line))
    return 0


def _cmd_verify(args) -> int:
    rows = acceptance.run_verify(args.out, args.seed, args.workers)
    print(acceptance.format_table(rows))
    return 0 if all(r.passed for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
