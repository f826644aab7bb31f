"""Batch command-line frontend: files in, plot-ready CSV/JSON out.

Every JSON payload embeds the fully resolved configuration so a rerun
from the same inputs reproduces the bytes exactly; no timestamps.  Exit
codes: 0 success, 1 solver or comparability failure, 2 usage and input
validation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BracketError,
    ComparabilityError,
    RideComfortError,
    ValidationError,
)
from .kinematics import MotionProfile, profile_from_csv, profile_to_csv
from .metrics import (
    CONTOUR_FACTORS,
    PSD_RATE,
    PSD_SEGMENT_CAP,
    band_energy,
    build_report,
    contours_to_csv,
    iso_discomfort_contours,
    psd,
    psd_to_csv,
)
from .objectives import (
    ObjectiveConfig,
    objective_config_from_dict,
    objective_config_to_dict,
)
from .planner import (
    PlanProblem,
    SolverSettings,
    match_travel_time,
    pareto_sweep,
    solve_plan,
    solve_plan_for_settings,
)
from .reconstruction import (
    ReconstructionSettings,
    WeightSchedule,
    align_imu,
    load_sensor_log,
    reconstruct,
    validate_run,
)
from .route import load_route

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class RunManifest:
    """Resolved file inputs for one invocation."""

    out_dir: str
    seed: int
    route: str | None = None
    gps: str | None = None
    imu: str | None = None
    outages: str | None = None
    profile: str | None = None

    def check(self) -> None:
        for path in (self.route, self.gps, self.imu, self.outages, self.profile):
            if path is not None and not os.path.isfile(path):
                raise ValidationError(f"{path}: no such file")
        os.makedirs(self.out_dir, exist_ok=True)
        if not os.access(self.out_dir, os.W_OK):
            raise ValidationError(f"{self.out_dir}: output directory not writable")


def default_config() -> dict:
    return {
        "objective": objective_config_to_dict(ObjectiveConfig()),
        "solver": {
            "tolerance": 1e-8,
            "max_iterations": 3000,
            "restarts": 3,
            "perturbation": 0.2,
            "seed": 0,
        },
        "reconstruction": {
            "w1_normal": 1.0,
            "w2_normal": 5.0,
            "w1_outage": 0.0,
            "w2_outage": 10.0,
            "max_iterations": 6000,
            "tolerance": 1e-10,
            "memory": 30,
            "heading_smoothness": 1e-6,
            "max_shift": 0.2,
        },
        "psd": {"rate": PSD_RATE, "segment_cap": PSD_SEGMENT_CAP},
        "contours": {"factors": list(CONTOUR_FACTORS)},
        # the matcher warm-starts along the bisection, one restart is enough
        "match": {"time_tolerance": 0.5, "restarts": 1},
        "validation": {"min_speed": 5.0},
    }


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _load_config(args) -> dict:
    cfg = default_config()
    if args.config is not None:
        if not os.path.isfile(args.config):
            raise ValidationError(f"{args.config}: no such file")
        with open(args.config, encoding="utf-8") as fh:
            try:
                user = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{args.config}: invalid JSON ({exc})") from exc
        if not isinstance(user, dict):
            raise ValidationError(f"{args.config}: top level must be an object")
        cfg = _merge(cfg, user)
    if args.seed is not None:
        cfg["solver"]["seed"] = int(args.seed)
    if getattr(args, "objective", None) is not None:
        cfg["objective"]["variant"] = args.objective
    if getattr(args, "time_weight", None) is not None:
        cfg["objective"]["time_weight"] = float(args.time_weight)
    return cfg


def _objective(cfg: dict) -> ObjectiveConfig:
    return objective_config_from_dict(cfg["objective"])


def _solver(cfg: dict) -> SolverSettings:
    s = cfg["solver"]
    return SolverSettings(
        tolerance=float(s["tolerance"]),
        max_iterations=int(s["max_iterations"]),
        restarts=int(s["restarts"]),
        perturbation=float(s["perturbation"]),
        seed=int(s["seed"]),
    )


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_plan(args) -> int:
    cfg = _load_config(args)
    manifest = RunManifest(out_dir=args.out, seed=cfg["solver"]["seed"], route=args.route)
    manifest.check()
    corridor = load_route(args.route)
    problem = PlanProblem(corridor, _objective(cfg), args.initial_speed, _solver(cfg))
    result = solve_plan(problem)
    profile_path = os.path.join(args.out, "plan_profile.csv")
    profile_to_csv(result.profile, profile_path)
    _write_json(
        {
            "command": "plan",
            "initial_speed": float(args.initial_speed),
            "cost": result.cost,
            "comfort": result.comfort,
            "travel_time": result.travel_time,
            "converged": result.converged,
            "iterations": result.iterations,
            "files": {"profile": "plan_profile.csv"},
            "config": cfg,
        },
        os.path.join(args.out, "plan.json"),
    )
    return EXIT_OK if result.converged else EXIT_FAILED


def cmd_match_time(args) -> int:
    cfg = _load_config(args)
    manifest = RunManifest(out_dir=args.out, seed=cfg["solver"]["seed"], route=args.route)
    manifest.check()
    corridor = load_route(args.route)
    settings = replace(_solver(cfg), restarts=int(cfg["match"]["restarts"]))
    tolerance = (
        args.time_tolerance
        if args.time_tolerance is not None
        else float(cfg["match"]["time_tolerance"])
    )
    match = match_travel_time(
        corridor, _objective(cfg), args.initial_speed, args.target_time,
        time_tolerance=tolerance, settings=settings,
    )
    profile_path = os.path.join(args.out, "match_profile.csv")
    profile_to_csv(match.result.profile, profile_path)
    _write_json(
        {
            "command": "match-time",
            "initial_speed": float(args.initial_speed),
            "target_time": match.target_time,
            "achieved_time": match.result.travel_time,
            "time_weight": match.time_weight,
            "matched": match.matched,
            "bisection_iterations": match.iterations,
            "comfort": match.result.comfort,
            "converged": match.result.converged,
            "files": {"profile": "match_profile.csv"},
            "config": cfg,
        },
        os.path.join(args.out, "match.json"),
    )
    return EXIT_OK if match.matched and match.result.converged else EXIT_FAILED


def _match_for_variant(corridor, objective: ObjectiveConfig, human: MotionProfile,
                       cfg: dict):
    settings = replace(_solver(cfg), restarts=int(cfg["match"]["restarts"]))
    return match_travel_time(
        corridor, objective, human.initial_speed, human.total_time,
        time_tolerance=float(cfg["match"]["time_tolerance"]), settings=settings,
    )


def _emit_psd_pair(profile: MotionProfile, stem: str, out_dir: str, cfg: dict) -> dict:
    files = {}
    for axis in ("longitudinal", "lateral"):
        estimate = psd(
            profile, axis,
            rate=float(cfg["psd"]["rate"]),
            segment_cap=int(cfg["psd"]["segment_cap"]),
        )
        name = f"psd_{stem}_{axis}.csv"
        psd_to_csv(estimate, os.path.join(out_dir, name))
        files[axis] = name
    return files


def cmd_compare(args) -> int:
    cfg = _load_config(args)
    manifest = RunManifest(
        out_dir=args.out, seed=cfg["solver"]["seed"],
        route=args.route, profile=args.human,
    )
    manifest.check()
    corridor = load_route(args.route)
    human = profile_from_csv(args.human)
    objective = _objective(cfg)

    # the raw-energy matching always runs; the weighted variant adds a
    # second matching under its own objective so each deficiency compares
    # against a plan optimal in the same sense
    match_ma = _match_for_variant(corridor, replace(objective, variant="ma"), human, cfg)
    matchings = {"ma": match_ma}
    planner_ms_profile = None
    if objective.variant == "ms":
        match_ms = _match_for_variant(corridor, objective, human, cfg)
        matchings["ms"] = match_ms
        planner_ms_profile = match_ms.result.profile

    report = build_report(
        human, match_ma.result.profile, planner_ms_profile,
        filter_spec=objective.filter_spec, cooldown=objective.cooldown,
    )
    shown = matchings[objective.variant]
    profile_path = os.path.join(args.out, "planner_profile.csv")
    profile_to_csv(shown.result.profile, profile_path)
    files = {"planner_profile": "planner_profile.csv"}
    files["psd_human"] = _emit_psd_pair(human, "human", args.out, cfg)
    files["psd_planner"] = _emit_psd_pair(shown.result.profile, "planner", args.out, cfg)

    payload = {
        "command": "compare",
        "report": report.to_dict(),
        "matching": {
            name: {
                "time_weight": m.time_weight,
                "matched": m.matched,
                "bisection_iterations": m.iterations,
                "achieved_time": m.result.travel_time,
                "converged": m.result.converged,
            }
            for name, m in matchings.items()
        },
        "files": files,
        "config": cfg,
    }
    _write_json(payload, os.path.join(args.out, "comparison.json"))
    ok = all(m.matched and m.result.converged for m in matchings.values())
    return EXIT_OK if ok else EXIT_FAILED


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    manifest = RunManifest(out_dir=args.out, seed=cfg["solver"]["seed"], route=args.route)
    manifest.check()
    weights = args.weights
    if not weights:
        raise ValidationError("weight grid is empty")
    if any(w <= 0.0 for w in weights):
        raise ValidationError(f"time weights must be positive, got {weights}")
    corridor = load_route(args.route)
    objective = _objective(cfg)
    settings = _solver(cfg)

    if args.jobs > 1:
        # cold solves fan out over processes; each row is independent
        problems = [
            PlanProblem(corridor, objective.with_time_weight(w),
                        args.initial_speed, settings)
            for w in weights
        ]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(solve_plan_for_settings, problems))
        rows = [
            {
                "time_weight": float(w),
                "travel_time": r.travel_time,
                "comfort": r.comfort,
                "converged": r.converged,
            }
            for w, r in zip(weights, results)
        ]
    else:
        rows = pareto_sweep(corridor, objective, weights, args.initial_speed, settings)

    sweep_path = os.path.join(args.out, "sweep.csv")
    with open(sweep_path, "w", newline="", encoding="utf-8") as fh:
        fh.write("time_weight,travel_time,comfort,converged\n")
        for row in rows:
            fh.write(
                f"{row['time_weight']:.9g},{row['travel_time']:.9g},"
                f"{row['comfort']:.9g},{'true' if row['converged'] else 'false'}\n"
            )

    files = {"sweep": "sweep.csv"}
    good = [row for row in rows if row["converged"]]
    if good:
        order = np.argsort([row["travel_time"] for row in good])
        times = np.array([good[i]["travel_time"] for i in order])
        comfort = np.array([good[i]["comfort"] for i in order])
        lines = iso_discomfort_contours(times, comfort, tuple(cfg["contours"]["factors"]))
        contours_to_csv(lines, os.path.join(args.out, "contours.csv"))
        files["contours"] = "contours.csv"

    fraction = len(good) / len(rows)
    _write_json(
        {
            "command": "sweep",
            "initial_speed": float(args.initial_speed),
            "rows": rows,
            "converged_fraction": fraction,
            "jobs": int(args.jobs),
            "files": files,
            "config": cfg,
        },
        os.path.join(args.out, "sweep.json"),
    )
    return EXIT_OK if fraction >= 0.8 else EXIT_FAILED


def cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    manifest = RunManifest(
        out_dir=args.out, seed=cfg["solver"]["seed"],
        gps=args.gps, imu=args.imu, outages=args.outages,
    )
    manifest.check()
    log = load_sensor_log(args.gps, args.imu, args.outages)
    rc = cfg["reconstruction"]
    schedule = WeightSchedule(
        w1_normal=float(rc["w1_normal"]), w2_normal=float(rc["w2_normal"]),
        w1_outage=float(rc["w1_outage"]), w2_outage=float(rc["w2_outage"]),
    )
    settings = ReconstructionSettings(
        max_iterations=int(rc["max_iterations"]), tolerance=float(rc["tolerance"]),
        memory=int(rc["memory"]), heading_smoothness=float(rc["heading_smoothness"]),
    )
    max_shift = float(rc["max_shift"])
    if max_shift > 0.0:
        log = align_imu(log, max_shift=max_shift, schedule=schedule)
    result = reconstruct(log, schedule, settings)
    valid, reasons = validate_run(result.profile, float(cfg["validation"]["min_speed"]))

    profile_path = os.path.join(args.out, "reconstructed_profile.csv")
    profile_to_csv(result.profile, profile_path)
    ts = float(result.grid_time[1] - result.grid_time[0])
    _write_json(
        {
            "command": "reconstruct",
            "imu_shift": result.imu_shift,
            "shift_warning": result.shift_warning,
            "cost": result.cost,
            "j_gps": result.j_gps,
            "j_imu": result.j_imu,
            "j_smooth": result.j_smooth,
            "converged": result.converged,
            "iterations": result.iterations,
            "energy_reduction_percent": result.energy_reduction_percent,
            "valid": valid,
            "validity_reasons": reasons,
            "grid": {"sample_time_s": ts, "samples": int(len(result.grid_time))},
            "files": {"profile": "reconstructed_profile.csv"},
            "config": cfg,
        },
        os.path.join(args.out, "reconstruction.json"),
    )
    return EXIT_OK if result.converged else EXIT_FAILED


def cmd_psd(args) -> int:
    cfg = _load_config(args)
    manifest = RunManifest(out_dir=args.out, seed=cfg["solver"]["seed"], profile=args.profile)
    manifest.check()
    profile = profile_from_csv(args.profile)
    if args.rate is not None:
        cfg["psd"]["rate"] = float(args.rate)
    if args.segment_cap is not None:
        cfg["psd"]["segment_cap"] = int(args.segment_cap)
    axes = ("longitudinal", "lateral") if args.axis == "both" else (args.axis,)
    files = {}
    totals = {}
    for axis in axes:
        estimate = psd(
            profile, axis,
            rate=float(cfg["psd"]["rate"]),
            segment_cap=int(cfg["psd"]["segment_cap"]),
        )
        name = f"psd_{axis}.csv"
        psd_to_csv(estimate, os.path.join(args.out, name))
        files[axis] = name
        totals[axis] = band_energy(
            estimate, float(estimate.frequencies[0]), float(estimate.frequencies[-1])
        )
    _write_json(
        {
            "command": "psd",
            "integrated_density": totals,
            "files": files,
            "config": cfg,
        },
        os.path.join(args.out, "psd.json"),
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    if args.min_speed is not None:
        cfg["validation"]["min_speed"] = float(args.min_speed)
    if args.route is None and args.profile is None and args.gps is None:
        raise ValidationError("nothing to validate: give --route, --profile or --gps/--imu")
    if (args.gps is None) != (args.imu is None):
        raise ValidationError("--gps and --imu must be given together")
    manifest = RunManifest(
        out_dir=args.out, seed=cfg["solver"]["seed"],
        route=args.route, profile=args.profile, gps=args.gps,
        imu=args.imu, outages=args.outages,
    )
    manifest.check()
    inputs = {}
    if args.route is not None:
        corridor = load_route(args.route)
        inputs["route"] = {"stations": len(corridor)}
    if args.profile is not None:
        profile = profile_from_csv(args.profile)
        valid, reasons = validate_run(profile, float(cfg["validation"]["min_speed"]))
        inputs["profile"] = {
            "samples": len(profile),
            "travel_time": float(profile.total_time),
            "min_speed": float(np.min(profile.speeds)),
            "valid": valid,
            "reasons": reasons,
        }
    if args.gps is not None:
        log = load_sensor_log(args.gps, args.imu, args.outages)
        inputs["sensor_log"] = {
            "gps_samples": int(len(log.gps_t)),
            "imu_samples": int(len(log.imu_t)),
            "outage_windows": [list(w) for w in log.outage_windows],
            "span_s": float(log.gps_t[-1] - log.gps_t[0]),
        }
    _write_json(
        {"command": "validate", "inputs": inputs, "config": cfg},
        os.path.join(args.out, "validate.json"),
    )
    return EXIT_OK


def _weight_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weight grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON configuration file")
    common.add_argument("--seed", type=int, metavar="INT", help="solver restart seed")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--jobs", type=int, metavar="N", default=1,
                        help="worker processes for sweep")

    objective_flags = argparse.ArgumentParser(add_help=False)
    objective_flags.add_argument("--objective", choices=("ma", "ms"),
                                 help="comfort term variant")
    objective_flags.add_argument("--time-weight", type=float, metavar="W",
                                 help="travel-time weight")

    parser = argparse.ArgumentParser(
        prog="ridecomfort",
        description="Plan, reconstruct and compare comfort-optimal vehicle motion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[common, objective_flags],
                       help="solve one comfort-optimal plan")
    p.add_argument("--route", required=True, metavar="FILE")
    p.add_argument("--initial-speed", required=True, type=float, metavar="V")
    p.set_defaults(handler=cmd_plan)

    p = sub.add_parser("match-time", parents=[common, objective_flags],
                       help="find the time weight hitting a target travel time")
    p.add_argument("--route", required=True, metavar="FILE")
    p.add_argument("--initial-speed", required=True, type=float, metavar="V")
    p.add_argument("--target-time", required=True, type=float, metavar="T")
    p.add_argument("--time-tolerance", type=float, metavar="S")
    p.set_defaults(handler=cmd_match_time)

    p = sub.add_parser("compare", parents=[common, objective_flags],
                       help="compare a recorded run against its time-matched plan")
    p.add_argument("--human", required=True, metavar="FILE",
                   help="recorded profile CSV")
    p.add_argument("--route", required=True, metavar="FILE")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("sweep", parents=[common, objective_flags],
                       help="Pareto sweep over time weights")
    p.add_argument("--route", required=True, metavar="FILE")
    p.add_argument("--initial-speed", required=True, type=float, metavar="V")
    p.add_argument("--weights", required=True, type=_weight_list,
                   metavar="W1,W2,...", help="time-weight grid")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("reconstruct", parents=[common],
                       help="reconstruct motion from a GPS+IMU log")
    p.add_argument("--gps", required=True, metavar="FILE")
    p.add_argument("--imu", required=True, metavar="FILE")
    p.add_argument("--outages", metavar="FILE", help="outage sidecar JSON")
    p.set_defaults(handler=cmd_reconstruct)

    p = sub.add_parser("psd", parents=[common],
                       help="Welch spectral density of a profile CSV")
    p.add_argument("--profile", required=True, metavar="FILE")
    p.add_argument("--axis", choices=("longitudinal", "lateral", "both"),
                   default="both")
    p.add_argument("--rate", type=float, metavar="HZ")
    p.add_argument("--segment-cap", type=int, metavar="N")
    p.set_defaults(handler=cmd_psd)

    p = sub.add_parser("validate", parents=[common],
                       help="check input files and run validity")
    p.add_argument("--route", metavar="FILE")
    p.add_argument("--profile", metavar="FILE")
    p.add_argument("--gps", metavar="FILE")
    p.add_argument("--imu", metavar="FILE")
    p.add_argument("--outages", metavar="FILE")
    p.add_argument("--min-speed", type=float, metavar="V")
    p.set_defaults(handler=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ComparabilityError, BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except RideComfortError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
