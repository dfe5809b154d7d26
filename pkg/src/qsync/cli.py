"""Scenario runner: parses TOML configs, dispatches to the dynamics modules,
runs sweeps in a work pool, and emits CSV data plus a run manifest.

Commands:

    qsync run <config.toml> [--out DIR] [--seed N]
    qsync sweep <config.toml> [--jobs N] [--out DIR] [--seed N]
    qsync list-scenarios

The environment variable QSYNC_OUT overrides the config's output directory;
an explicit --out wins over both. Exit codes: 0 success, 2 schema violation,
3 numerical instability, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__, kuramoto, linear_osc, optomech, spins
from .errors import ConfigError, InstabilityError, QsyncError
from .grids import SweepGrid
from .measures import WindowSpec
from .statecore import write_csv

REQUIRED = object()


# ---------------------------------------------------------------------------
# Schema validation
# ---------------------------------------------------------------------------


def _as_float(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _as_int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return int(v)


def _as_str(choices=None):
    def cast(v):
        if not isinstance(v, str):
            raise TypeError("expected a string")
        if choices and v not in choices:
            raise TypeError(f"expected one of {sorted(choices)}")
        return v

    return cast


def _as_float_list(v):
    if not isinstance(v, list) or not v:
        raise TypeError("expected a nonempty list of numbers")
    return [_as_float(x) for x in v]


def validate_table(data: dict, schema: dict, path: str = "") -> dict:
    """Check ``data`` against ``schema``, rejecting unknown keys.

    Schema values are either nested dicts (sub-tables) or (caster, default)
    pairs; ``REQUIRED`` as default makes the key mandatory.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'} must be a table")
    out = {}
    for key in data:
        if key not in schema:
            raise ConfigError(f"unknown key {path + key!r}")
    for key, rule in schema.items():
        where = f"{path}{key}"
        if isinstance(rule, dict):
            out[key] = validate_table(data.get(key, {}), rule, where + ".")
            continue
        cast, default = rule
        if key not in data:
            if default is REQUIRED:
                raise ConfigError(f"missing required key {where!r}")
            out[key] = default
            continue
        try:
            out[key] = cast(data[key])
        except TypeError as exc:
            raise ConfigError(f"bad value for {where!r}: {exc}") from None
    return out


AXIS_SCHEMA = {
    "min": (_as_float, None),
    "max": (_as_float, None),
    "count": (_as_int, None),
    "values": (_as_float_list, None),
}


def axis_values(axis: dict, name: str) -> np.ndarray:
    if axis["values"] is not None:
        return np.asarray(axis["values"], dtype=float)
    if axis["min"] is None or axis["max"] is None or axis["count"] is None:
        raise ConfigError(f"sweep axis {name!r} needs either values or min/max/count")
    if axis["count"] < 2:
        raise ConfigError(f"sweep axis {name!r} needs count >= 2")
    return np.linspace(axis["min"], axis["max"], axis["count"])


# ---------------------------------------------------------------------------
# Scenario registry
# ---------------------------------------------------------------------------

OPTOMECH_MODEL_SCHEMA = {
    "omega1": (_as_float, 1.0),
    "omega2": (_as_float, 1.005),
    "delta1": (_as_float, None),
    "delta2": (_as_float, None),
    "g": (_as_float, 0.005),
    "mu": (_as_float, -0.02),
    "kappa": (_as_float, 0.30),
    "gamma_m": (_as_float, 0.005),
    "drive": (_as_float, 48.0),
    "q1_init": (_as_float, 100.0),
    "q2_init": (_as_float, -100.0),
    "fluct_scale": (_as_float, 100.0),
    "mech_squeeze": (_as_float, 0.0),
    "r_min": (_as_float, 1.0),
}

SPIN_MODEL_SCHEMA = {
    "omega1": (_as_float, 1.0),
    "alpha": (_as_float, 0.01),
    "cutoff": (_as_float, 20.0),
    "temperature": (_as_float, 0.0),
    "t_pearson": (_as_float, 75.0),
    "window": (_as_float, 10.0),
    "t_corr": (_as_float, 80.0),
    "z_horizon": (_as_float, 100.0),
    "dt": (_as_float, 0.01),
    "sample_dt": (_as_float, 0.05),
    "coupling_channel": (_as_str({"x", "z"}), "x"),
}

TONGUE_MODEL_SCHEMA = {
    "omega1": (_as_float, 1.0),
    "bath": (_as_str({"common", "separate"}), "common"),
    "alpha": (_as_float, 0.01),
    "cutoff": (_as_float, 20.0),
    "temperature": (_as_float, 0.0),
    "squeezing": (_as_float, 1.0),
    "squeeze_angle2": (_as_float, 0.4 * math.pi),
    "coupling_form": (_as_str({"bilinear", "spring"}), "bilinear"),
    "t_eval": (_as_float, 150.0),
    "window": (_as_float, 100.0),
    "dt": (_as_float, 0.005),
}

KURAMOTO_MODEL_SCHEMA = {
    "n": (_as_int, 2000),
    "distribution": (_as_str({"lorentzian", "gaussian"}), "lorentzian"),
    "center": (_as_float, 1.0),
    "width": (_as_float, 0.5),
    "noise": (_as_float, 0.0),
    "dt": (_as_float, 0.01),
    "t_final": (_as_float, 100.0),
    "threshold": (_as_float, 0.1),
    "discard_frac": (_as_float, 0.5),
}


def _optomech_spec(model: dict) -> optomech.OptomechSpec:
    model = dict(model)
    # laser on the self-oscillation side of each cavity unless overridden
    if model["delta1"] is None:
        model["delta1"] = -model["omega1"]
    if model["delta2"] is None:
        model["delta2"] = -model["omega2"]
    return optomech.OptomechSpec(**model)


def run_optomech(config: dict, out_dir: str, seed: int) -> dict:
    spec = _optomech_spec(config["model"])
    tgrid = config["time"]
    run = optomech.co_integrate(
        spec, tgrid["t_final"], dt=tgrid["dt"], sample_stride=tgrid["sample_stride"]
    )
    window = WindowSpec(width=config["window"]["width"], delay=config["window"]["delay"])
    indicators = optomech.indicator_suite(run, window)
    outputs = []
    run.to_csv(os.path.join(out_dir, "mean_field.csv"), os.path.join(out_dir, "covariance.csv"))
    outputs += ["mean_field.csv", "covariance.csv"]
    for name, series in indicators.items():
        fname = f"indicator_{name}.csv"
        series.to_csv(os.path.join(out_dir, fname))
        outputs.append(fname)
    return {"outputs": outputs, "extras": {}, "warnings": []}


OPTOMECH_SCHEMA = {
    "model": OPTOMECH_MODEL_SCHEMA,
    "time": {
        "t_final": (_as_float, 1500.0),
        "dt": (_as_float, 0.0025),
        "sample_stride": (_as_int, 100),
    },
    "window": {"width": (_as_float, 20.0), "delay": (_as_float, 0.0)},
}


def _spin_scenario(config: dict, asymmetry: float, v1, v2) -> spins.SpinDiagramScenario:
    m = config["model"]
    return spins.SpinDiagramScenario(
        omega1=m["omega1"],
        omega2_values=tuple(v1),
        lambda_values=tuple(v2),
        asymmetry=asymmetry,
        alpha=m["alpha"],
        cutoff=m["cutoff"],
        temperature=m["temperature"],
        t_pearson=m["t_pearson"],
        window=m["window"],
        t_corr=m["t_corr"],
        z_horizon=m["z_horizon"],
        dt=m["dt"],
        sample_dt=m["sample_dt"],
        coupling_channel=m["coupling_channel"],
    )


def _spin_cell_worker(payload):
    scn, omega2, lam = payload
    try:
        cell = spins.diagram_cell(scn, omega2, lam)
    except spins.DegeneracyError:
        return {}, "degenerate"
    except Exception as exc:
        return {}, f"error: {exc}"
    marginal = cell.pop("_marginal")
    return cell, ("secular-marginal" if marginal else "ok")


def _tongue_cell_worker(payload):
    scn, omega2, lam = payload
    try:
        return linear_osc.tongue_cell(scn, omega2, lam), "ok"
    except Exception as exc:
        return {}, f"error: {exc}"


def _assemble_grid(axis_names, v1, v2, layer_names, results, meta):
    grid = SweepGrid.empty(axis_names[0], axis_names[1], v1, v2, layer_names, meta)
    idx = 0
    for i in range(len(v1)):
        for j in range(len(v2)):
            values, status = results[idx]
            grid.set_cell(i, j, values, status=status)
            idx += 1
    return grid


def _pool_map(worker, payloads, jobs: int):
    if jobs <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, payloads, chunksize=max(1, len(payloads) // (4 * jobs))))


def sweep_spin(config: dict, out_dir: str, seed: int, jobs: int, asymmetry: float, fname: str) -> dict:
    v1 = axis_values(config["sweep"]["omega2"], "omega2")
    v2 = axis_values(config["sweep"]["lambda"], "lambda")
    scn = _spin_scenario(config, asymmetry, v1, v2)
    payloads = [(scn, float(a), float(b)) for a in v1 for b in v2]
    results = _pool_map(_spin_cell_worker, payloads, jobs)
    grid = _assemble_grid(
        ("omega2", "lambda"), v1, v2, spins.DIAGRAM_LAYERS, results, {"asymmetry": asymmetry}
    )
    grid.to_csv(os.path.join(out_dir, fname))
    n_bad = int(sum(1 for _, s in results if s.startswith(("error", "degenerate"))))
    warnings = [f"{n_bad} cells flagged"] if n_bad else []
    return {"outputs": [fname], "extras": {"flagged_cells": n_bad}, "warnings": warnings}


SPIN_SWEEP_SCHEMA = {
    "model": SPIN_MODEL_SCHEMA,
    "sweep": {"omega2": AXIS_SCHEMA, "lambda": AXIS_SCHEMA},
}


def sweep_tongue(config: dict, out_dir: str, seed: int, jobs: int) -> dict:
    v1 = axis_values(config["sweep"]["omega2"], "omega2")
    v2 = axis_values(config["sweep"]["lambda"], "lambda")
    m = config["model"]
    scn = linear_osc.TongueScenario(
        omega1=m["omega1"],
        omega2_values=tuple(v1),
        lambda_values=tuple(v2),
        bath=m["bath"],
        alpha=m["alpha"],
        cutoff=m["cutoff"],
        temperature=m["temperature"],
        squeezing=m["squeezing"],
        squeeze_angles=(0.0, m["squeeze_angle2"]),
        coupling_form=m["coupling_form"],
        t_eval=m["t_eval"],
        window=m["window"],
        dt=m["dt"],
    )
    payloads = [(scn, float(a), float(b)) for a in v1 for b in v2]
    results = _pool_map(_tongue_cell_worker, payloads, jobs)
    grid = _assemble_grid(
        ("omega2", "lambda"), v1, v2, ["pearson", "discord"], results, {"bath": m["bath"]}
    )
    grid.to_csv(os.path.join(out_dir, "tongue.csv"))
    n_bad = int(sum(1 for _, s in results if s != "ok"))
    return {
        "outputs": ["tongue.csv"],
        "extras": {"flagged_cells": n_bad},
        "warnings": [f"{n_bad} cells flagged"] if n_bad else [],
    }


TONGUE_SCHEMA = {
    "model": TONGUE_MODEL_SCHEMA,
    "sweep": {"omega2": AXIS_SCHEMA, "lambda": AXIS_SCHEMA},
}


def cell_seed(master: int, index: int) -> int:
    """Per-cell seed derived from the master seed and the cell counter."""
    return int(np.random.SeedSequence([master, index]).generate_state(1)[0])


def _kuramoto_cell_worker(payload):
    base, coupling, seed = payload
    run = kuramoto.simulate(replace(base, coupling=coupling, seed=seed))
    start = run.r.size // 2
    return run.times, run.r, float(run.r[start:].mean())


def sweep_kuramoto(config: dict, out_dir: str, seed: int, jobs: int) -> dict:
    m = config["model"]
    if m["distribution"] == "lorentzian":
        dist = kuramoto.LorentzianFreqs(center=m["center"], gamma=m["width"])
    else:
        dist = kuramoto.GaussianFreqs(center=m["center"], sigma=m["width"])
    base = kuramoto.KuramotoSpec(
        n=m["n"],
        frequencies=dist,
        coupling=0.0,
        noise=m["noise"],
        dt=m["dt"],
        t_final=m["t_final"],
        seed=seed,
    )
    ks = axis_values(config["sweep"]["coupling"], "coupling")
    payloads = [(base, float(k), cell_seed(seed, i)) for i, k in enumerate(ks)]
    results = _pool_map(_kuramoto_cell_worker, payloads, jobs)
    r_mean = np.array([r for _, _, r in results])
    write_csv(
        os.path.join(out_dir, "kc_table.csv"),
        ["coupling", "r_mean"],
        zip(ks, r_mean),
    )
    times = results[0][0]
    header = ["t"] + [f"r_K{k:g}" for k in ks]
    rows = zip(times, *(r for _, r, _ in results))
    write_csv(os.path.join(out_dir, "r_series.csv"), header, rows)
    # reuse the estimator's crossing logic on the already computed table
    above = r_mean > m["threshold"]
    notes = []
    if above[0]:
        k_c = float(ks[0])
        notes.append("onset at or below the smallest sweep coupling")
    elif not np.any(above):
        k_c = float(ks[-1])
        notes.append("threshold never crossed inside the sweep range")
    else:
        hi = int(np.argmax(above))
        frac = (m["threshold"] - r_mean[hi - 1]) / (r_mean[hi] - r_mean[hi - 1])
        k_c = float(ks[hi - 1] + frac * (ks[hi] - ks[hi - 1]))
    return {
        "outputs": ["kc_table.csv", "r_series.csv"],
        "extras": {"k_c": k_c},
        "warnings": notes,
    }


KURAMOTO_SCHEMA = {
    "model": KURAMOTO_MODEL_SCHEMA,
    "sweep": {"coupling": AXIS_SCHEMA},
}


def run_spin_corr(config: dict, out_dir: str, seed: int, jobs: int) -> dict:
    out = {"outputs": [], "extras": {}, "warnings": []}
    for asym, fname in ((0.0, "spin_corr_local.csv"), (1.0, "spin_corr_common.csv")):
        part = sweep_spin(config, out_dir, seed, jobs, asym, fname)
        out["outputs"] += part["outputs"]
        out["warnings"] += part["warnings"]
    return out


SCENARIOS = {
    "fig-optomech": {
        "kind": "single",
        "schema": OPTOMECH_SCHEMA,
        "doc": "synchronized optomechanical pair: mean field, covariance, 7 indicators",
    },
    "fig-optomech-detuned": {
        "kind": "single",
        "schema": OPTOMECH_SCHEMA,
        "doc": "detuned optomechanical pair (no synchronization)",
    },
    "fig-tongue": {
        "kind": "sweep",
        "schema": TONGUE_SCHEMA,
        "doc": "linear-oscillator tongue: pearson + discord over (omega2, lambda)",
    },
    "fig-spin-local": {
        "kind": "sweep",
        "schema": SPIN_SWEEP_SCHEMA,
        "doc": "spin synchronization diagram, bath on the second spin only",
    },
    "fig-spin-common": {
        "kind": "sweep",
        "schema": SPIN_SWEEP_SCHEMA,
        "doc": "spin synchronization diagram, common bath",
    },
    "fig-spin-corr": {
        "kind": "sweep",
        "schema": SPIN_SWEEP_SCHEMA,
        "doc": "Z integral and mutual information maps for both bath cases",
    },
    "kuramoto-kc": {
        "kind": "sweep",
        "schema": KURAMOTO_SCHEMA,
        "doc": "Kuramoto order parameter sweep with critical-coupling estimate",
    },
    "custom": {
        "kind": "custom",
        "schema": None,
        "doc": "explicit scenario: set kind = one of the other scenario ids",
    },
}

TOP_SCHEMA_BASE = {
    "scenario": (_as_str(set(SCENARIOS)), REQUIRED),
    "seed": (_as_int, 0),
    "output_dir": (_as_str(), "qsync-out"),
}


def load_config(path: str):
    with open(path, "rb") as fh:
        raw_bytes = fh.read()
    try:
        data = tomllib.loads(raw_bytes.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML parse error: {exc}") from None
    scenario = data.get("scenario")
    if scenario == "custom":
        kind_id = data.get("kind")
        if kind_id not in SCENARIOS or kind_id == "custom":
            raise ConfigError("custom scenario requires kind = a concrete scenario id")
        schema = dict(TOP_SCHEMA_BASE)
        schema["kind"] = (_as_str(set(SCENARIOS) - {"custom"}), REQUIRED)
        schema.update(SCENARIOS[kind_id]["schema"])
        config = validate_table(data, schema)
        effective = kind_id
    else:
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {scenario!r}")
        schema = dict(TOP_SCHEMA_BASE)
        schema.update(SCENARIOS[scenario]["schema"])
        config = validate_table(data, schema)
        effective = scenario
    return config, effective, hashlib.sha256(raw_bytes).hexdigest()


def resolve_out_dir(config: dict, cli_out) -> str:
    if cli_out:
        return cli_out
    env = os.environ.get("QSYNC_OUT")
    if env:
        return env
    return config["output_dir"]


def write_manifest(out_dir, scenario, config_hash, wall, outputs, warnings, extras) -> None:
    checksums = {}
    for name in sorted(outputs):
        with open(os.path.join(out_dir, name), "rb") as fh:
            checksums[name] = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "scenario": scenario,
        "config_hash": config_hash,
        "tool_version": __version__,
        "wall_time_s": round(wall, 3),
        "outputs": checksums,
        "warnings": warnings,
        **({"extras": extras} if extras else {}),
    }
    tmp = os.path.join(out_dir, "manifest.json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, os.path.join(out_dir, "manifest.json"))


def _dispatch(command, config, effective, out_dir, seed, jobs):
    if effective in ("fig-optomech", "fig-optomech-detuned"):
        if command != "run":
            raise ConfigError(f"scenario {effective!r} is a single run; use 'qsync run'")
        if effective == "fig-optomech-detuned" and config["model"]["omega2"] == 1.005:
            config["model"]["omega2"] = 1.2  # preset unless the config overrides it
        return run_optomech(config, out_dir, seed)
    if command != "sweep":
        raise ConfigError(f"scenario {effective!r} declares a sweep; use 'qsync sweep'")
    if effective == "fig-spin-local":
        return sweep_spin(config, out_dir, seed, jobs, 0.0, "spin_diagram.csv")
    if effective == "fig-spin-common":
        return sweep_spin(config, out_dir, seed, jobs, 1.0, "spin_diagram.csv")
    if effective == "fig-spin-corr":
        return run_spin_corr(config, out_dir, seed, jobs)
    if effective == "fig-tongue":
        return sweep_tongue(config, out_dir, seed, jobs)
    if effective == "kuramoto-kc":
        return sweep_kuramoto(config, out_dir, seed, jobs)
    raise ConfigError(f"unhandled scenario {effective!r}")


def _execute(command: str, args) -> int:
    config, effective, config_hash = load_config(args.config)
    seed = args.seed if args.seed is not None else config["seed"]
    out_dir = resolve_out_dir(config, args.out)
    os.makedirs(out_dir, exist_ok=True)
    jobs = getattr(args, "jobs", 1)
    start = time.monotonic()
    result = _dispatch(command, config, effective, out_dir, seed, jobs)
    write_manifest(
        out_dir,
        effective,
        config_hash,
        time.monotonic() - start,
        result["outputs"],
        result["warnings"],
        result["extras"],
    )
    print(f"{effective}: wrote {len(result['outputs'])} files to {out_dir}")
    return 0


def _error_report(exc: Exception, code: int) -> int:
    report = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(report, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qsync", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a single scenario")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_sweep = sub.add_parser("sweep", help="run a sweep scenario")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    sub.add_parser("list-scenarios", help="list scenario ids")
    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        for name in sorted(SCENARIOS):
            print(f"{name:22s} {SCENARIOS[name]['doc']}")
        return 0
    try:
        return _execute(args.command, args)
    except ConfigError as exc:
        return _error_report(exc, 2)
    except InstabilityError as exc:
        return _error_report(exc, 3)
    except OSError as exc:
        return _error_report(exc, 4)
    except QsyncError as exc:
        return _error_report(exc, 1)


if __name__ == "__main__":
    sys.exit(main())
