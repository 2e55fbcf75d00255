"""Command-line front end.

One task per invocation; a TOML config describes the function and the
knobs, results land as JSON plus plot-ready CSV.  All output is written
atomically and is byte-stable for a fixed config and seed (the single
volatile "meta" object carries the timestamp and wall time and is the only
part excluded from determinism guarantees).

Exit status: 0 success, 2 finished with feasibility/convergence warnings,
1 error (rendered to stderr with a stable code).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:  # python < 3.11
    import tomli as _toml

from . import __version__
from .core import (
    GridFunction,
    IndicatorFunction,
    PiecewiseQuadratic1D,
    RadialFunction,
)
from .duality import counterexample_function, counterexample_report, duality_check
from .errors import (
    ArgumentError,
    BracketError,
    CenterOutsideError,
    ConfigError,
    ConvergenceError,
    ConvexityError,
    DegeneracyError,
    DomainError,
    EmptyLevelSetError,
    InvariantError,
    LownerJohnError,
    SearchRegionError,
)
from .geometry import HPolytope, SymmetricPolytope
from .legendre import polar
from .mvie import centered_mvie, mvie_certificate
from .oracle import brute_john_1d, brute_lowner_1d, brute_centered_mvie_2d, default_grids_1d
from .profiles import PowerSumProfile
from .solver import PrimalLevelSets, john, lowner, xi_scan

TASKS = (
    "lowner",
    "john",
    "polar",
    "xi-scan",
    "duality-check",
    "counterexample",
    "mvie",
    "oracle",
)

_ERROR_CODES = [
    (ConfigError, "E_CONFIG"),
    (ConvexityError, "E_CONVEXITY"),
    (CenterOutsideError, "E_CENTER"),
    (EmptyLevelSetError, "E_EMPTY_LEVEL"),
    (DegeneracyError, "E_DEGENERATE"),
    (ConvergenceError, "E_CONVERGENCE"),
    (BracketError, "E_BRACKET"),
    (DomainError, "E_DOMAIN"),
    (SearchRegionError, "E_REGION"),
    (InvariantError, "E_INVARIANT"),
    (ArgumentError, "E_ARGUMENT"),
    (LownerJohnError, "E_RUNTIME"),
]

_DEFAULT_TOLERANCES = {
    "s_floor_factor": 1e-9,
    "xi_utol": 1e-8,
    "mvie_gap": 1e-8,
    "feasibility_margin": 1e-6,
    "duality_log_s": 1e-3,
    "duality_ttt_rel": 1e-2,
    "duality_center": 1e-3,
}

_SCHEMA = {
    "": {"task", "seed", "function", "tolerances", "scan", "duality", "mvie", "oracle"},
    "function": {
        "variant",
        "terms",
        "dim",
        "sides",
        "normals",
        "offsets",
        "box",
        "pieces",
        "axes",
        "values",
        "name",
    },
    "tolerances": set(_DEFAULT_TOLERANCES),
    "scan": {"points"},
    "duality": {"center"},
    "mvie": {"normals", "offsets"},
    "oracle": {"kind", "resolution", "angle_steps", "axis_steps"},
}


@dataclass(frozen=True)
class RunConfig:
    task: str
    function: dict | None
    tolerances: dict
    scan_points: int
    seed: int
    duality_center: list | None
    mvie_spec: dict | None
    oracle_spec: dict
    out_dir: str = "."
    json_only: bool = False
    source: dict = field(default_factory=dict)


def _check_keys(table, section):
    allowed = _SCHEMA[section]
    for key in table:
        if key not in allowed:
            where = section or "top level"
            raise ConfigError(f"unknown key '{key}' in {where}")


def parse_config(path, task=None, overrides=None) -> RunConfig:
    """Load and validate a TOML run configuration (unknown keys rejected)."""
    try:
        with open(path, "rb") as fh:
            raw = _toml.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"TOML parse error in {path}: {exc}")
    return build_config(raw, task=task, overrides=overrides)


def build_config(raw: dict, task=None, overrides=None) -> RunConfig:
    overrides = overrides or {}
    _check_keys(raw, "")
    for section in ("function", "tolerances", "scan", "duality", "mvie", "oracle"):
        if section in raw:
            if not isinstance(raw[section], dict):
                raise ConfigError(f"section '{section}' must be a table")
            _check_keys(raw[section], section)

    cfg_task = raw.get("task")
    if task and cfg_task and task != cfg_task:
        raise ConfigError(f"config task '{cfg_task}' conflicts with subcommand '{task}'")
    final_task = task or cfg_task
    if final_task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {final_task!r}")

    tols = dict(_DEFAULT_TOLERANCES)
    tols.update(raw.get("tolerances", {}))
    for name, val in tols.items():
        if not (isinstance(val, (int, float)) and val > 0):
            raise ConfigError(f"tolerance '{name}' must be a positive number")

    scan_points = int(overrides.get("scan_points") or raw.get("scan", {}).get("points", 129))
    if scan_points < 3:
        raise ConfigError("scan.points must be at least 3")
    seed = int(overrides.get("seed") if overrides.get("seed") is not None else raw.get("seed", 0))
    if "tol" in overrides and overrides["tol"] is not None:
        if overrides["tol"] <= 0:
            raise ConfigError("--tol must be positive")
        tols["feasibility_margin"] = float(overrides["tol"])

    function = raw.get("function")
    needs_function = final_task not in ("counterexample", "mvie")
    if final_task == "oracle" and raw.get("oracle", {}).get("kind") == "mvie2d":
        needs_function = False
    if function is None and needs_function:
        raise ConfigError(f"task '{final_task}' needs a [function] table")
    if function is not None:
        build_function(function)  # validate eagerly, fail-closed

    duality_center = raw.get("duality", {}).get("center")
    mvie_spec = raw.get("mvie")
    oracle_spec = dict(raw.get("oracle", {}))
    return RunConfig(
        task=final_task,
        function=function,
        tolerances=tols,
        scan_points=scan_points,
        seed=seed,
        duality_center=duality_center,
        mvie_spec=mvie_spec,
        oracle_spec=oracle_spec,
        out_dir=str(overrides.get("out") or "."),
        json_only=bool(overrides.get("json_only", False)),
        source=raw,
    )


def build_function(spec: dict):
    variant = spec.get("variant")
    if variant == "radial":
        terms = spec.get("terms")
        dim = spec.get("dim")
        if not terms or dim is None:
            raise ConfigError("radial variant needs 'terms' and 'dim'")
        try:
            profile = PowerSumProfile(tuple((float(c), float(p)) for c, p in terms))
            return RadialFunction(profile, int(dim), sides=spec.get("sides"))
        except LownerJohnError as exc:
            raise ConfigError(f"function.terms: {exc}")
    if variant == "indicator":
        if "box" in spec:
            box = spec["box"]
            return IndicatorFunction(HPolytope.box([b[0] for b in box], [b[1] for b in box]))
        if "normals" not in spec or "offsets" not in spec:
            raise ConfigError("indicator variant needs 'normals'+'offsets' or 'box'")
        return IndicatorFunction(HPolytope(spec["normals"], spec["offsets"]))
    if variant == "piecewise_quad":
        pieces = spec.get("pieces")
        if not pieces:
            raise ConfigError("piecewise_quad variant needs 'pieces'")
        try:
            return PiecewiseQuadratic1D([tuple(p) for p in pieces])
        except LownerJohnError as exc:
            raise ConfigError(f"function.pieces: {exc}")
    if variant == "grid":
        if "axes" not in spec or "values" not in spec:
            raise ConfigError("grid variant needs 'axes' and 'values'")
        return GridFunction([np.asarray(a, dtype=float) for a in spec["axes"]], np.asarray(spec["values"], dtype=float))
    if variant == "preset":
        name = spec.get("name")
        if name == "counterexample":
            return counterexample_function()
        raise ConfigError(f"unknown preset '{name}'")
    raise ConfigError(f"unknown function variant {variant!r}")


# ---------------------------------------------------------------------------
# serialization


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _write_atomic(path, text):
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("%.17g" % v for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _report_dict(report):
    return {
        "kind": report.kind,
        "T": report.optimizer.T,
        "b": report.optimizer.b,
        "t": report.optimizer.t,
        "s0": report.s0,
        "det_T": report.optimizer.det_T(),
        "objective": report.objective,
        "feasibility_margin": report.feasibility_margin,
        "iterations": report.iterations,
        "diagnostics": report.diagnostics,
    }


def _optimizer_samples(report, f):
    n = f.dim
    E = report.optimizer
    scale = f.support_scale() + float(np.linalg.norm(E.center))
    counts = {1: 257, 2: 65, 3: 17}[n]
    axes = [np.linspace(-2 * scale, 2 * scale, counts) for _ in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.column_stack([m.ravel() for m in mesh])
    fv = np.exp(-np.minimum(f.psi_batch(X), 745.0))
    if report.kind == "lowner":
        ev = np.exp(-np.minimum(E.exponent_batch(X), 745.0))
    else:
        inside = np.linalg.norm(np.linalg.solve(E.T, (X - E.center).T).T, axis=1) <= 1.0
        ev = np.where(inside, report.s0, 0.0)
    header = [f"x{i+1}" for i in range(n)] + ["optimizer", "f"]
    rows = np.column_stack([X, ev, fv])
    return header, rows


# ---------------------------------------------------------------------------
# task runners


def run(config: RunConfig):
    """Execute one task; returns (exit_status, artifact_paths)."""
    t0 = time.perf_counter()
    warnings = []
    result = {}
    csv_jobs = []

    f = build_function(config.function) if config.function else None
    task = config.task

    if task in ("lowner", "john"):
        driver = lowner if task == "lowner" else john
        report = driver(f, seed=config.seed)
        warnings.extend(report.warnings)
        if report.feasibility_margin > config.tolerances["feasibility_margin"]:
            warnings.append(
                f"feasibility margin {report.feasibility_margin:.3e} above tolerance"
            )
        result = _report_dict(report)
        if not config.json_only:
            header, rows = _optimizer_samples(report, f)
            csv_jobs.append((f"{task}_samples.csv", header, rows))

    elif task == "polar":
        center = np.asarray(config.duality_center or [0.0] * f.dim, dtype=float)
        pol = polar(f, center)
        result = {
            "center": center,
            "provenance": pol.provenance,
            "description": pol.fn.describe(),
        }
        if not config.json_only:
            scale = pol.fn.support_scale()
            n = f.dim
            counts = {1: 513, 2: 65, 3: 17}[n]
            axes = [np.linspace(-2 * scale, 2 * scale, counts) for _ in range(n)]
            mesh = np.meshgrid(*axes, indexing="ij")
            X = np.column_stack([m.ravel() for m in mesh])
            vals = pol.fn.psi_batch(X)
            header = [f"y{i+1}" for i in range(n)] + ["psi_polar"]
            csv_jobs.append(("polar_samples.csv", header, np.column_stack([X, vals])))

    elif task == "xi-scan":
        provider = PrimalLevelSets(f, np.zeros(f.dim))
        profile = xi_scan(
            provider,
            points=config.scan_points,
            floor_factor=config.tolerances["s_floor_factor"],
            identity=f.describe(),
        )
        result = {
            "points": config.scan_points,
            "s_range": list(profile.s_range),
            "log_concavity_defect": profile.log_concavity_defect(),
            "max_xi": float(np.max(profile.xi)),
            "argmax_s": float(profile.s[int(np.argmax(profile.xi))]),
        }
        with np.errstate(divide="ignore"):
            rows = np.column_stack(
                [profile.s, np.log(profile.s), profile.xi, np.log(profile.xi), profile.dets]
            )
        if not config.json_only:
            csv_jobs.append(("xi_scan.csv", ["s", "log_s", "xi", "log_xi", "det_T"], rows))

    elif task == "duality-check":
        center = np.asarray(config.duality_center or [0.0] * f.dim, dtype=float)
        rep = duality_check(
            f,
            center,
            tolerances={
                "log_s": config.tolerances["duality_log_s"],
                "ttt_rel": config.tolerances["duality_ttt_rel"],
                "center": config.tolerances["duality_center"],
            },
            seed=config.seed,
        )
        warnings.extend(rep.right.warnings)
        result = {
            "verdict": rep.verdict,
            "delta_log_s": rep.delta_log_s,
            "delta_ttt_rel": rep.delta_ttt,
            "delta_center": rep.delta_center,
            "left": {
                "s": rep.left.s,
                "T": rep.left.T,
                "center": rep.left.center,
                "is_indicator": rep.left.is_indicator,
            },
            "right": _report_dict(rep.right),
        }

    elif task == "counterexample":
        rep = counterexample_report(seed=config.seed)
        result = {
            "hprime": rep.hprime,
            "verdict": rep.verdict,
            "step_values": {("%g" % k): v for k, v in rep.step_values.items()},
            "duality_verdict": rep.duality.verdict,
            "duality_delta_log_s": rep.duality.delta_log_s,
            "lowner": _report_dict(
                lowner(counterexample_function(), seed=config.seed)
            ),
        }

    elif task == "mvie":
        if not config.mvie_spec:
            raise ConfigError("mvie task needs a [mvie] table with normals/offsets")
        P = SymmetricPolytope(config.mvie_spec["normals"], config.mvie_spec["offsets"])
        sol = centered_mvie(P, gap_tol=config.tolerances["mvie_gap"])
        feas, margin, local = mvie_certificate(P, sol.T, seed=config.seed)
        result = {
            "T": sol.T,
            "logdet": sol.logdet,
            "det": sol.det,
            "active_rows": list(sol.active_rows),
            "kkt_residual": sol.kkt_residual,
            "certificate": {"feasible": feas, "margin": margin, "locally_optimal": local},
        }

    elif task == "oracle":
        kind = config.oracle_spec.get("kind", "lowner")
        if kind == "mvie2d":
            if not config.mvie_spec:
                raise ConfigError("oracle.kind 'mvie2d' needs a [mvie] table")
            P = SymmetricPolytope(config.mvie_spec["normals"], config.mvie_spec["offsets"])
            res = brute_centered_mvie_2d(
                P,
                angle_steps=int(config.oracle_spec.get("angle_steps", 180)),
                axis_steps=int(config.oracle_spec.get("axis_steps", 256)),
            )
            res = res.with_reference(centered_mvie(P).det)
        elif kind in ("lowner", "john"):
            resolution = int(config.oracle_spec.get("resolution", 96))
            a_grid, b_grid, t_grid = default_grids_1d(f, resolution)
            if kind == "lowner":
                res = brute_lowner_1d(f, a_grid, b_grid, t_grid)
                main = lowner(f, seed=config.seed)
            else:
                res = brute_john_1d(f, a_grid, b_grid)
                main = john(f, seed=config.seed)
            res = res.with_reference(main.objective)
        else:
            raise ConfigError(f"oracle.kind must be lowner, john or mvie2d, got {kind!r}")
        result = {
            "kind": kind,
            "params": {k: v for k, v in res.params.items() if not isinstance(v, np.ndarray)},
            "objective": res.objective,
            "gap_vs_main": res.gap_vs,
            "grids": res.grids,
        }
    else:  # pragma: no cover - guarded by parse_config
        raise ConfigError(f"unhandled task {task}")

    doc = {
        "task": task,
        "library_version": __version__,
        "seed": config.seed,
        "tolerances": config.tolerances,
        "result": _jsonable(result),
        "warnings": list(warnings),
        "meta": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "wall_time_s": time.perf_counter() - t0,
        },
    }
    paths = []
    out_json = os.path.join(config.out_dir, "result.json")
    _write_atomic(out_json, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    paths.append(out_json)
    for name, header, rows in csv_jobs:
        p = os.path.join(config.out_dir, name)
        _write_csv(p, header, rows)
        paths.append(p)
    return (2 if warnings else 0), paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lownerjohn",
        description="Ellipsoidal majorants/minorants of log-concave functions",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for t in TASKS:
        p = sub.add_parser(t)
        p.add_argument("--config", required=(t not in ("counterexample",)), default=None)
        p.add_argument("--out", default=".")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--scan-points", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--json-only", action="store_true")
    args = parser.parse_args(argv)

    overrides = {
        "out": args.out,
        "tol": args.tol,
        "scan_points": args.scan_points,
        "seed": args.seed,
        "json_only": args.json_only,
    }
    try:
        if args.config is None:
            config = build_config({"task": args.task}, task=args.task, overrides=overrides)
        else:
            config = parse_config(args.config, task=args.task, overrides=overrides)
        status, paths = run(config)
    except LownerJohnError as exc:
        code = next(c for cls, c in _ERROR_CODES if isinstance(exc, cls))
        print(f"error[{code}]: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return status


if __name__ == "__main__":
    sys.exit(main())
