"""Batch driver: read a JSON run configuration, execute one named experiment
and write deterministic CSV tables plus a machine-readable run manifest.

Config layout (schema_version 1):

    {
      "schema_version": 1,
      "experiment": "VanillaSmile",
      "output": "smile",
      "sentinel": "inf",                  # optional, for diverging implied vols
      "tolerances": {"psd": 1e-10, "factor": 1e-10, "eig": 1e-12},   # optional
      "parameters": { ... experiment specific ... }
    }

Grids are given either as explicit arrays or as {"start", "stop", "count"}.
Unknown keys are rejected everywhere.  Outputs are CSV (LF line endings,
header row, 12 significant digits) plus ``<output>_manifest.json`` carrying
the config hash, effective tolerances and summary statistics.  Re-running an
identical config reproduces the outputs byte for byte, regardless of the
thread count.

Exit codes: 0 success, 2 config error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .attainment import implied_root_variance_curve, local_attainment_scan
from .engine import DEFAULT_TOLERANCES, Tolerances
from .errors import ConfigError, MomentBoundsError
from .markets import (
    SwapCurveSlice,
    annuity_weights,
    caplet_cdf_scan,
    caplet_point_mass,
    cross_root_variance,
)
from .models import LognormalModel, bs_call_price, implied_normal_vol
from .partition import flat_conditional_moments, linear_conditional_moments, refined_bound
from .vanilla import check_decreasing_convex, smile_curve, vanilla_bound

__all__ = ["RunConfig", "load_config", "run", "main", "EXPERIMENTS"]

SCHEMA_VERSION = 1
DEFAULT_SENTINEL = "inf"


# ---------------------------------------------------------------------------
# Config parsing


def _require_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object, got {type(obj).__name__}")
    return obj


def _reject_unknown(obj: dict, allowed, where: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(f"{where} must be a number, got {obj!r}")
    return float(obj)


def _integer(obj, where: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(f"{where} must be an integer, got {obj!r}")
    return int(obj)


def _grid(obj, where: str) -> np.ndarray:
    """Parse a grid: explicit array or {"start", "stop", "count"}."""
    if isinstance(obj, list):
        if not obj:
            raise ConfigError(f"{where} must not be empty")
        return np.array([_number(v, f"{where}[{i}]") for i, v in enumerate(obj)])
    if isinstance(obj, dict):
        _reject_unknown(obj, {"start", "stop", "count"}, where)
        for key in ("start", "stop", "count"):
            if key not in obj:
                raise ConfigError(f"{where} needs '{key}'")
        count = _integer(obj["count"], f"{where}.count")
        if count < 2:
            raise ConfigError(f"{where}.count must be >= 2")
        return np.linspace(_number(obj["start"], where), _number(obj["stop"], where), count)
    raise ConfigError(f"{where} must be an array or a start/stop/count object")


def _float_list(obj, where: str) -> list:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{where} must be a non-empty array")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(obj)]


def _take(params: dict, where: str, required: dict, optional: dict | None = None) -> dict:
    """Validate a parameter block against converter maps and apply defaults."""
    optional = optional or {}
    _reject_unknown(params, set(required) | set(optional), where)
    out = {}
    for name, convert in required.items():
        if name not in params:
            raise ConfigError(f"missing key '{name}' in {where}")
        out[name] = convert(params[name], f"{where}.{name}")
    for name, (convert, default) in optional.items():
        out[name] = convert(params[name], f"{where}.{name}") if name in params else default
    return out


def _root_variance_of(params: dict, where: str) -> float:
    """Accept root_variance directly, or sigma + expiry via the lognormal identity."""
    has_nu = "root_variance" in params
    has_sigma = "sigma" in params
    if has_nu == has_sigma:
        raise ConfigError(f"{where} needs exactly one of 'root_variance' or 'sigma'")
    if has_nu:
        return _number(params.pop("root_variance"), f"{where}.root_variance")
    sigma = _number(params.pop("sigma"), f"{where}.sigma")
    expiry = _number(params.get("expiry", 1.0), f"{where}.expiry")
    return LognormalModel(1.0, sigma, expiry).root_variance


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration plus the raw dict it was parsed from."""

    experiment: str
    parameters: dict
    output: str
    tolerances: Tolerances
    sentinel: str
    raw: dict

    @property
    def sha256(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path) -> RunConfig:
    """Read and validate a config file; raises ConfigError on any defect."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _require_mapping(raw, "config")
    _reject_unknown(
        raw,
        {"schema_version", "experiment", "output", "parameters", "tolerances", "sentinel"},
        "config",
    )
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; choose one of {', '.join(sorted(EXPERIMENTS))}"
        )
    output = raw.get("output")
    if not isinstance(output, str) or not output or "/" in output or "\\" in output:
        raise ConfigError("'output' must be a non-empty file stem without path separators")
    tol_block = _require_mapping(raw.get("tolerances", {}), "tolerances")
    _reject_unknown(tol_block, {"psd", "factor", "eig"}, "tolerances")
    tolerances = Tolerances(
        psd=_number(tol_block.get("psd", DEFAULT_TOLERANCES.psd), "tolerances.psd"),
        factor=_number(tol_block.get("factor", DEFAULT_TOLERANCES.factor), "tolerances.factor"),
        eig=_number(tol_block.get("eig", DEFAULT_TOLERANCES.eig), "tolerances.eig"),
    )
    sentinel = raw.get("sentinel", DEFAULT_SENTINEL)
    if not isinstance(sentinel, str) or not sentinel:
        raise ConfigError("'sentinel' must be a non-empty string")
    parameters = _require_mapping(raw.get("parameters", {}), "parameters")
    config = RunConfig(experiment, parameters, output, tolerances, sentinel, raw)
    # Fail fast on bad parameters so --validate-only means something.
    try:
        EXPERIMENTS[experiment].prepare(config)
    except MomentBoundsError as exc:
        raise ConfigError(f"invalid parameters for {experiment}: {exc}") from exc
    return config


# ---------------------------------------------------------------------------
# Experiment runners.  Each prepare() validates parameters into a plan;
# execute() turns a plan into (columns, rows, summary).


def _ordered_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class Experiment:
    name: str
    prepare: callable
    execute: callable


def _prepare_vanilla_smile(config: RunConfig):
    p = _take(
        config.parameters,
        "parameters",
        {
            "forward": _number,
            "root_variances": _float_list,
            "strikes": _grid,
        },
        {"expiry": (_number, 1.0)},
    )
    for nu in p["root_variances"]:
        if not 0.0 <= nu <= 1.0:
            raise ConfigError(f"root_variances entries must lie in [0, 1], got {nu}")
    if np.any(p["strikes"] <= 0.0) or np.any(np.diff(p["strikes"]) <= 0.0):
        raise ConfigError("strikes must be positive and strictly increasing")
    if not p["forward"] > 0.0 or not p["expiry"] > 0.0:
        raise ConfigError("forward and expiry must be positive")
    return p


def _run_vanilla_smile(plan, config: RunConfig, threads: int):
    strikes = plan["strikes"]
    curves = _ordered_map(
        lambda nu: smile_curve(plan["forward"], nu, strikes, plan["expiry"]),
        plan["root_variances"],
        threads,
    )
    rows = []
    for nu, curve in zip(plan["root_variances"], curves):
        check_decreasing_convex(strikes, curve.bounds, label=f"smile bound (nu={nu})")
        for i, k in enumerate(strikes):
            rows.append((nu, k, curve.bounds[i], curve.implied_vols[i], curve.cdf[i]))
    summary = {
        "curve_count": len(curves),
        "strike_count": int(strikes.size),
        "max_bound": max(float(np.max(c.bounds)) for c in curves),
    }
    return ["nu", "strike", "bound", "implied_vol", "cdf"], rows, summary


def _prepare_refine(config: RunConfig, kind: str):
    key = "partitions" if kind == "flat" else "strike_sets"
    p = _take(
        config.parameters,
        "parameters",
        {"forward": _number, "sigma": _number, key: lambda v, w: v, "eval_strikes": _grid},
        {"expiry": (_number, 1.0)},
    )
    model = LognormalModel(p["forward"], p["sigma"], p["expiry"])
    sets = p[key]
    if not isinstance(sets, list) or not sets:
        raise ConfigError(f"parameters.{key} must be a non-empty array of grids")
    parsed = []
    for i, grid in enumerate(sets):
        if not isinstance(grid, list):
            raise ConfigError(f"parameters.{key}[{i}] must be an array")
        values = np.array([_number(v, f"{key}[{i}]") for v in grid])
        if values.size and (np.any(values <= 0.0) or np.any(np.diff(values) <= 0.0)):
            raise ConfigError(f"parameters.{key}[{i}] must be positive and increasing")
        if kind == "linear" and values.size == 1:
            raise ConfigError("linear partitions need zero (vanilla) or >= 2 strikes")
        parsed.append(values)
    strikes = p["eval_strikes"]
    if np.any(strikes <= 0.0) or np.any(np.diff(strikes) <= 0.0):
        raise ConfigError("eval_strikes must be positive and strictly increasing")
    return {"model": model, "sets": parsed, "strikes": strikes, "kind": kind}


def _run_refine(plan, config: RunConfig, threads: int):
    model, strikes = plan["model"], plan["strikes"]
    tol = config.tolerances
    columns = ["strike"]
    curves = []
    for grid in plan["sets"]:
        if plan["kind"] == "flat":
            moments = flat_conditional_moments(model, grid, tol=tol)
            columns.append(f"bound_N{moments.cells}")
        elif grid.size == 0:
            moments = flat_conditional_moments(model, [], tol=tol)
            columns.append("bound_K0")
        else:
            moments = linear_conditional_moments(model, grid, tol=tol)
            columns.append(f"bound_K{grid.size}")
        curves.append(
            np.array(_ordered_map(lambda k: refined_bound(moments, float(k), tol), strikes, threads))
        )
    reference = np.array([bs_call_price(model, float(k)) for k in strikes])
    columns.append("bs_price")
    for name, curve in zip(columns[1:], curves + [reference]):
        check_decreasing_convex(strikes, curve, label=name)
    rows = [
        tuple([strikes[i]] + [curve[i] for curve in curves] + [reference[i]])
        for i in range(strikes.size)
    ]
    gaps = [float(np.max(curve - reference)) for curve in curves]
    summary = {
        "max_gap_by_column": dict(zip(columns[1:-1], gaps)),
        "convergence_ratio": gaps[-1] / gaps[0] if gaps[0] > 0.0 else 0.0,
        "reference_dominated": bool(all(float(np.min(c - reference)) >= -1e-10 for c in curves)),
    }
    return columns, rows, summary


def _prepare_fx_cross(config: RunConfig):
    p = _take(
        config.parameters,
        "parameters",
        {
            "forward": _number,
            "nu1": _number,
            "nu2": _number,
            "correlations": _float_list,
            "strikes": _grid,
        },
    )
    for nu in (p["nu1"], p["nu2"]):
        if not 0.0 <= nu <= 1.0:
            raise ConfigError("leg root-variances must lie in [0, 1]")
    for rho in p["correlations"]:
        if not -1.0 <= rho <= 1.0:
            raise ConfigError("correlations must lie in [-1, 1]")
    if np.any(p["strikes"] <= 0.0) or np.any(np.diff(p["strikes"]) <= 0.0):
        raise ConfigError("strikes must be positive and strictly increasing")
    if not p["forward"] > 0.0:
        raise ConfigError("forward must be positive")
    return p


def _run_fx_cross(plan, config: RunConfig, threads: int):
    strikes = plan["strikes"]
    rows = []
    previous = None
    max_rho_increase = -math.inf
    for rho in plan["correlations"]:
        nu = cross_root_variance(plan["nu1"], plan["nu2"], rho)
        bounds = np.array(
            _ordered_map(lambda k: vanilla_bound(plan["forward"], nu, float(k)), strikes, threads)
        )
        check_decreasing_convex(strikes, bounds, label=f"fx bound (rho={rho})")
        if previous is not None:
            max_rho_increase = max(max_rho_increase, float(np.max(bounds - previous)))
        previous = bounds
        for i, k in enumerate(strikes):
            rows.append((rho, k, nu, bounds[i]))
    summary = {"max_bound_increase_with_rho": None if previous is None else max_rho_increase}
    return ["rho", "strike", "cross_nu", "bound"], rows, summary


def _prepare_caplet(config: RunConfig, scan_shifts: bool):
    params = dict(config.parameters)
    nu = _root_variance_of(params, "parameters")
    if not 0.0 <= nu <= 1.0:
        raise ConfigError(f"root-variance must lie in [0, 1], got {nu}")
    required = {
        "discount_rate": _number,
        "periods": _integer,
        "period_index": _integer,
        "swap_rate": _number,
        "strikes": _grid,
    }
    if scan_shifts:
        required["correlation"] = _number
        required["shifts"] = _float_list
        optional = {"daycount": (_number, 1.0), "expiry": (_number, 1.0)}
    else:
        required["correlations"] = _float_list
        optional = {
            "daycount": (_number, 1.0),
            "shift": (_number, 0.0),
            "expiry": (_number, 1.0),
        }
    p = _take(params, "parameters", required, optional)
    n = p["period_index"]
    if not 2 <= n <= p["periods"]:
        raise ConfigError(f"period_index must lie in 2..{p['periods']}")
    shifts = p["shifts"] if scan_shifts else [p["shift"]]
    rhos = [p["correlation"]] if scan_shifts else p["correlations"]
    slices = {}
    for alpha in shifts:
        for rho in rhos:
            slices[(alpha, rho)] = SwapCurveSlice.with_flat_discounting(
                p["discount_rate"], p["periods"], p["daycount"], p["swap_rate"], nu, rho, alpha
            )
    if np.any(np.diff(p["strikes"]) <= 0.0):
        raise ConfigError("strikes must be strictly increasing")
    return {
        "slices": slices,
        "n": n,
        "strikes": p["strikes"],
        "expiry": p["expiry"],
        "shifts": shifts,
        "rhos": rhos,
        "scan_shifts": scan_shifts,
    }


def _caplet_forward(slice_: SwapCurveSlice, n: int) -> float:
    lam = annuity_weights(slice_, n).lam
    return (lam + 1.0) * float(slice_.forwards[n - 1]) - lam * float(slice_.forwards[n - 2])


def _run_caplet(plan, config: RunConfig, threads: int):
    tol = config.tolerances
    strikes = plan["strikes"]
    scan_shifts = plan["scan_shifts"]
    columns = (
        ["alpha", "strike", "bound", "implied_normal_vol", "cdf", "positive_eigenvalues"]
        if scan_shifts
        else ["rho", "strike", "bound", "implied_normal_vol", "cdf"]
    )
    rows = []
    summary = {"switch_strikes": {}, "point_mass_at_zero": {}} if scan_shifts else {"switch_strikes": {}}
    keys = [(a, r) for a in plan["shifts"] for r in plan["rhos"]]
    for alpha, rho in keys:
        slice_ = plan["slices"][(alpha, rho)]
        scan = caplet_cdf_scan(slice_, plan["n"], strikes, tol)
        check_decreasing_convex(strikes, scan.bounds, label=f"caplet bound (alpha={alpha}, rho={rho})")
        forward = _caplet_forward(slice_, plan["n"])
        vols = _ordered_map(
            lambda i: implied_normal_vol(forward, float(strikes[i]), plan["expiry"], float(scan.bounds[i])),
            range(strikes.size),
            threads,
        )
        label = f"alpha={alpha:g}" if scan_shifts else f"rho={rho:g}"
        summary["switch_strikes"][label] = list(scan.switch_strikes)
        if scan_shifts:
            summary["point_mass_at_zero"][label] = caplet_point_mass(slice_, plan["n"], 0.0, tol=tol)
        for i in range(strikes.size):
            lead = alpha if scan_shifts else rho
            row = [lead, strikes[i], scan.bounds[i], vols[i], scan.cdf[i]]
            if scan_shifts:
                row.append(int(scan.positive_counts[i]))
            rows.append(tuple(row))
    return columns, rows, summary


def _prepare_local_attain(config: RunConfig):
    p = _take(
        config.parameters,
        "parameters",
        {"forward": _number, "root_variance": _number, "strikes": _grid},
        {"attain_tol": (_number, 1e-9)},
    )
    if not 0.0 < p["root_variance"] < 1.0:
        raise ConfigError("root_variance must lie strictly inside (0, 1)")
    if not p["forward"] > 0.0:
        raise ConfigError("forward must be positive")
    if np.any(p["strikes"] <= 0.0) or np.any(np.diff(p["strikes"]) <= 0.0):
        raise ConfigError("strikes must be positive and strictly increasing")
    return p


def _run_local_attain(plan, config: RunConfig, threads: int):
    report = local_attainment_scan(
        plan["forward"],
        plan["root_variance"],
        plan["strikes"],
        attain_tol=plan["attain_tol"],
        tol=config.tolerances,
    )
    check_decreasing_convex(report.strikes, report.bounds, label="attainment bound")
    rows = [
        (
            report.strikes[i],
            report.angles[i],
            report.lows[i],
            report.highs[i],
            report.binomial_prices[i],
            report.bounds[i],
            report.gaps[i],
        )
        for i in range(report.strikes.size)
    ]
    summary = {
        "max_gap": report.max_gap,
        "implied_nu": report.implied_nu,
        "constraint_nu": report.constraint_nu,
    }
    columns = ["strike", "angle", "low_state", "high_state", "binomial_price", "bound", "gap"]
    return columns, rows, summary


def _prepare_global_attain(config: RunConfig):
    p = _take(config.parameters, "parameters", {"root_variances": _grid})
    grid = p["root_variances"]
    if np.any(grid < 0.0) or np.any(grid > 1.0) or np.any(np.diff(grid) <= 0.0):
        raise ConfigError("root_variances must be increasing inside [0, 1]")
    return p


def _run_global_attain(plan, config: RunConfig, threads: int):
    curve = implied_root_variance_curve(plan["root_variances"])
    rows = [
        (curve.constraint_nu[i], curve.sqrt_moment[i], curve.implied_nu[i])
        for i in range(curve.constraint_nu.size)
    ]
    interior = curve.margins[1:-1] if curve.constraint_nu.size > 2 else curve.margins
    summary = {
        "min_interior_margin": float(np.min(interior)) if interior.size else None,
        "endpoint_errors": [
            float(abs(curve.implied_nu[0] - curve.constraint_nu[0])),
            float(abs(curve.implied_nu[-1] - curve.constraint_nu[-1])),
        ],
    }
    return ["nu", "implied_sqrt_moment", "implied_nu"], rows, summary


EXPERIMENTS = {
    "VanillaSmile": Experiment(
        "VanillaSmile", _prepare_vanilla_smile, _run_vanilla_smile
    ),
    "FlatRefine": Experiment(
        "FlatRefine", lambda c: _prepare_refine(c, "flat"), _run_refine
    ),
    "LinearRefine": Experiment(
        "LinearRefine", lambda c: _prepare_refine(c, "linear"), _run_refine
    ),
    "FxCross": Experiment("FxCross", _prepare_fx_cross, _run_fx_cross),
    "CapletBound": Experiment(
        "CapletBound", lambda c: _prepare_caplet(c, scan_shifts=False), _run_caplet
    ),
    "CapletCdf": Experiment(
        "CapletCdf", lambda c: _prepare_caplet(c, scan_shifts=True), _run_caplet
    ),
    "LocalAttain": Experiment("LocalAttain", _prepare_local_attain, _run_local_attain),
    "GlobalAttain": Experiment("GlobalAttain", _prepare_global_attain, _run_global_attain),
}


# ---------------------------------------------------------------------------
# Output


def _format_value(value, sentinel: str) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isinf(value):
        return sentinel
    return f"{value:.11e}"


def _write_csv(path: Path, columns, rows, sentinel: str) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_value(v, sentinel) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def run(config: RunConfig, out_dir, threads: int = 1) -> Path:
    """Execute one experiment; returns the manifest path.

    Partially written outputs are removed if execution fails.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    experiment = EXPERIMENTS[config.experiment]
    plan = experiment.prepare(config)
    csv_path = out / f"{config.output}.csv"
    manifest_path = out / f"{config.output}_manifest.json"
    written = []
    try:
        columns, rows, summary = experiment.execute(plan, config, threads)
        _write_csv(csv_path, columns, rows, config.sentinel)
        written.append(csv_path)
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "experiment": config.experiment,
            "config_sha256": config.sha256,
            "tolerances": {
                "psd": config.tolerances.psd,
                "factor": config.tolerances.factor,
                "eig": config.tolerances.eig,
            },
            "outputs": [csv_path.name],
            "rows": len(rows),
            "summary": _jsonable(summary),
        }
        manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        written.append(manifest_path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        csv_path.unlink(missing_ok=True)
        raise
    return manifest_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="momentbounds",
        description="Run moment-bound experiments from a JSON config and write CSV tables.",
    )
    parser.add_argument("--config", type=Path, help="path to the run configuration")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for grid sweeps")
    parser.add_argument(
        "--list-experiments", action="store_true", help="list experiment names and exit"
    )
    parser.add_argument(
        "--validate-only", action="store_true", help="validate the config and exit"
    )
    args = parser.parse_args(argv)

    if args.list_experiments:
        for name in sorted(EXPERIMENTS):
            print(name)
        return 0
    if args.config is None:
        print("error: ConfigError: --config is required", file=sys.stderr)
        return 2
    try:
        config = load_config(args.config)
        if args.validate_only:
            print(f"config ok: {config.experiment} -> {config.output}")
            return 0
        if args.out is None:
            print("error: ConfigError: --out is required", file=sys.stderr)
            return 2
        if args.threads < 1:
            print("error: ConfigError: --threads must be >= 1", file=sys.stderr)
            return 2
        manifest = run(config, args.out, threads=args.threads)
    except ConfigError as exc:
        print(f"error: ConfigError: {exc}", file=sys.stderr)
        return 2
    except MomentBoundsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return 4
    print(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
