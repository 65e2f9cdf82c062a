"""Configuration-driven command line: solve, check, rollout, export.

Exit codes: 0 success; 1 config parse error; 2 invariant/precondition
violation; 3 iteration budget exhausted (best-effort field still written);
4 rollout ended without reaching the target; 5 field/config digest mismatch.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import config as config_mod
from . import fieldio, rollout as rollout_mod, verification
from .errors import ConfigError, FrontGameError
from .solver import arrival_field, solve

CHECK_SUITES = ("contraction", "monotonicity", "consistency", "bound", "wulff", "refine")

# Quadratic test profiles (value, gradient, hessian): gradients stay >= 0.5
# in norm and every Hessian couples the gradient and tangent directions.
CONSISTENCY_QUADRATICS = [
    (0.2, (1.0, 0.0), ((0.5, 0.7), (0.7, -0.3))),
    (0.0, (0.6, 0.8), ((1.0, 0.4), (0.4, 0.2))),
    (-0.1, (0.0, -1.0), ((-0.5, 0.6), (0.6, 1.0))),
    (0.4, (0.72, -0.54), ((0.3, -0.5), (-0.5, -0.8))),
    (0.1, (1.2, 0.9), ((1.2, 0.9), (0.9, -0.4))),
]
CONSISTENCY_EPS = (0.2, 0.1, 0.05, 0.025)


def consistency_n_dir(eps):
    return max(4, round(3.2 / eps))


def _write_manifest(out_dir, command, digest, outputs, exit_status):
    fieldio.write_json(
        Path(out_dir) / "manifest.json",
        {
            "command": command,
            "config_digest": digest,
            "outputs": sorted(str(p) for p in outputs),
            "exit_status": exit_status,
        },
    )


def cmd_solve(config_path, out_dir):
    cfg, digest = config_mod.load(config_path)
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    field, diag = solve(cfg)
    paths = {
        "csv": out / "field.csv",
        "bin": out / "field.bin",
        "sidecar": out / "field.json",
        "diag": out / "diagnostics.json",
    }
    fieldio.write_field_csv(paths["csv"], field)
    fieldio.write_field_binary(paths["bin"], paths["sidecar"], field, cfg.model.digest)
    fieldio.write_json(paths["diag"], diag.as_dict())
    status = 0 if diag.converged else 3
    _write_manifest(out, "solve", digest, list(paths.values()) + [out / "manifest.json"], status)
    if not diag.converged:
        print(
            f"solve: residual {diag.final_residual:g} after {diag.iterations} iterations "
            "(budget exhausted)",
            file=sys.stderr,
        )
    return status


def _check_contraction(cfg, trials, seed):
    ratio = verification.contraction_test(cfg, trials, seed)
    limit = math.exp(-cfg.epsilon**2) + 1e-12
    return {
        "test": "contraction",
        "params": {"trials": trials, "seed": seed, "epsilon": cfg.epsilon},
        "metrics": {"max_ratio": ratio, "limit": limit},
        "pass": ratio <= limit,
    }


def _check_monotonicity(cfg, trials, seed):
    ok, worst = verification.monotonicity_test(cfg, trials, seed)
    return {
        "test": "monotonicity",
        "params": {"trials": trials, "seed": seed},
        "metrics": {"worst_violation": worst, "tolerance": 1e-12},
        "pass": ok,
    }


def _check_consistency(cfg):
    x = np.zeros(cfg.model.dimension)
    reports = []
    ok = True
    for quad in CONSISTENCY_QUADRATICS:
        rep = verification.consistency_study(
            cfg.model, quad, x, CONSISTENCY_EPS, consistency_n_dir, cfg.n_basis
        )
        first1, last1 = abs(rep.ratios_part1[0]), abs(rep.ratios_part1[-1])
        first3, last3 = abs(rep.ratios_part3[0]), abs(rep.ratios_part3[-1])
        ok = ok and first1 >= 2.0 * last1 and first3 >= 2.0 * last3
        reports.append(rep.as_dict())
    return {
        "test": "consistency",
        "params": {"eps_values": list(CONSISTENCY_EPS)},
        "metrics": {"reports": reports},
        "pass": ok,
    }


def _check_bound(cfg):
    big_r, _ = verification.upper_bound_oracle(cfg.model, np.zeros(cfg.model.dimension))
    target = cfg.target
    if target.kind != "ball" or np.linalg.norm(target.center) > 1e-12 or target.radius < big_r:
        raise FrontGameError(
            f"bound suite needs a target ball at the origin with radius >= R = {big_r:g}"
        )
    field, _ = solve(cfg)
    arr = arrival_field(field)
    pts = cfg.grid.points()
    radii = np.linalg.norm(pts, axis=1)
    free = ~field.target_mask.ravel()
    finite = np.isfinite(arr.U.ravel()) & free
    slack = 2.0 * cfg.grid.spacing / cfg.model.c_min
    bounds = (2.0 / cfg.model.c_min) * radii - 4.0 * cfg.model.sigma_frobenius_max**2 / cfg.model.c_min**2
    excess = arr.U.ravel()[finite] - (bounds[finite] + slack)
    violations = int(np.sum(excess > 0))
    return {
        "test": "bound",
        "params": {"R": big_r, "slack": slack},
        "metrics": {
            "checked": int(finite.sum()),
            "violations": violations,
            "max_excess": float(excess.max()) if excess.size else 0.0,
        },
        "pass": violations == 0,
    }


def _check_wulff(cfg, t_values):
    field, _ = solve(cfg)
    arr = arrival_field(field)
    pts = cfg.grid.points()
    gauges = verification.gauge_many(cfg.model, pts, 720)
    t0 = float(np.max(gauges[field.target_mask.ravel()]))
    results = [
        verification.wulff_inclusion_test(arr, cfg.model, t, t0, 720) for t in t_values
    ]
    return {
        "test": "wulff",
        "params": {"t_values": list(t_values), "t0": t0},
        "metrics": {"results": results},
        "pass": all(r["pass"] for r in results),
    }


def _check_refine(cfg):
    model = cfg.model
    if (
        model.b_spec is None
        or model.c_spec is None
        or model.b_spec.kind != "constant"
        or model.c_spec.kind != "constant"
        or cfg.target.kind != "ball"
        or callable(cfg.target.boundary_value)
        or float(cfg.target.boundary_value) != 0.0
    ):
        raise FrontGameError(
            "refine suite needs constant b, constant c, a ball target, and G = 0"
        )
    oracle = verification.RadialOracleParams(
        r0=float(cfg.target.radius), beta=model.b_min, gamma=model.c_min
    )
    levels = [
        (4.0 * cfg.epsilon, 4.0 * cfg.grid.spacing, max(4, cfg.n_dir // 4)),
        (2.0 * cfg.epsilon, 2.0 * cfg.grid.spacing, max(4, cfg.n_dir // 2)),
        (cfg.epsilon, cfg.grid.spacing, cfg.n_dir),
    ]
    report = verification.refinement_study(cfg, levels, oracle)
    errs = report.sup_errors
    return {
        "test": "refine",
        "params": {"levels": [list(level) for level in report.levels]},
        "metrics": report.as_dict(),
        "pass": True,
        "monotone_decrease": all(a > b for a, b in zip(errs, errs[1:])),
    }


def cmd_check(config_path, suite, out_dir, trials=30, seed=None, t_values=(1.0, 2.0, 4.0)):
    cfg, digest = config_mod.load(config_path)
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = cfg.seed if seed is None else seed
    if suite == "contraction":
        report = _check_contraction(cfg, trials, seed)
    elif suite == "monotonicity":
        report = _check_monotonicity(cfg, trials, seed)
    elif suite == "consistency":
        report = _check_consistency(cfg)
    elif suite == "bound":
        report = _check_bound(cfg)
    elif suite == "wulff":
        report = _check_wulff(cfg, t_values)
    elif suite == "refine":
        report = _check_refine(cfg)
    else:
        raise ConfigError(f"unknown suite {suite!r}")
    report_path = out / f"report_{suite}.json"
    fieldio.write_json(report_path, report)
    status = 0 if report["pass"] else 2
    _write_manifest(out, f"check {suite}", digest, [report_path, out / "manifest.json"], status)
    return status


def cmd_rollout(config_path, field_path, x, mode, out_dir, alpha=1e-3, target_radius=None):
    cfg, digest = config_mod.load(config_path)
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    x = np.asarray(x, dtype=float)

    if mode == "concentric":
        if target_radius is None:
            if cfg.target.kind != "ball":
                raise FrontGameError("concentric mode needs --target-radius or a ball target")
            target_radius = float(cfg.target.radius)
        traj = rollout_mod.concentric_rollout(cfg.model, target_radius, x, cfg.epsilon)
    else:
        field_path = Path(field_path)
        sidecar = field_path.with_suffix(".json")
        field, model_digest = fieldio.read_field_binary(field_path, sidecar)
        if (
            model_digest != cfg.model.digest
            or field.grid.counts != cfg.grid.counts
            or field.grid.spacing != cfg.grid.spacing
            or not np.array_equal(field.grid.origin, cfg.grid.origin)
            or field.epsilon != cfg.epsilon
        ):
            print("rollout: field does not match the configuration digest", file=sys.stderr)
            return 5
        traj = rollout_mod.epsilon_optimal_rollout(cfg, field, x, alpha)

    traj_path = out / "trajectory.csv"
    payoff_path = out / "payoff.json"
    fieldio.write_trajectory_csv(traj_path, traj)
    fieldio.write_json(
        payoff_path,
        {
            "terminated": traj.terminated,
            "steps": traj.steps,
            "payoff_transformed": traj.payoff_transformed,
            "payoff_time": traj.payoff_time if math.isfinite(traj.payoff_time) else "inf",
            "alpha": traj.alpha,
            "interp_slack": traj.interp_slack,
            "start_value": traj.start_value if math.isfinite(traj.start_value) else None,
        },
    )
    status = 0 if traj.terminated == rollout_mod.HIT_TARGET else 4
    _write_manifest(
        out, f"rollout {mode}", digest, [traj_path, payoff_path, out / "manifest.json"], status
    )
    return status


def cmd_export(field_path, out_csv):
    field_path = Path(field_path)
    field, _ = fieldio.read_field_binary(field_path, field_path.with_suffix(".json"))
    fieldio.write_field_csv(out_csv, field)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="frontgame",
        description="Arrival-time solver for anisotropic forced curvature fronts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the fixed-point solve and export the field")
    p.add_argument("config")
    p.add_argument("--out", required=True)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("config")
    p.add_argument("--suite", required=True, choices=CHECK_SUITES)
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--t", type=float, nargs="+", default=[1.0, 2.0, 4.0])

    p = sub.add_parser("rollout", help="play a trajectory over a solved field")
    p.add_argument("config")
    p.add_argument("--field", default=None, help="field.bin from a solve run")
    p.add_argument("--at", type=float, nargs="+", required=True)
    p.add_argument("--mode", choices=("optimal", "concentric"), default="optimal")
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--target-radius", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("export", help="re-export a binary field as CSV")
    p.add_argument("field")
    p.add_argument("--out", required=True)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args.config, args.out)
        if args.command == "check":
            return cmd_check(args.config, args.suite, args.out, args.trials, args.seed, tuple(args.t))
        if args.command == "rollout":
            if args.mode == "optimal" and args.field is None:
                raise ConfigError("optimal rollout needs --field")
            return cmd_rollout(
                args.config, args.field, args.at, args.mode, args.out, args.alpha, args.target_radius
            )
        if args.command == "export":
            return cmd_export(args.field, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FrontGameError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
