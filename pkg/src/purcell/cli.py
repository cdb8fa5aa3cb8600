"""Command-line surface: every workflow is runnable headlessly from here.

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
"""

import argparse
import math
import os
import sys

import numpy as np

from .config import RunConfig, config_echo, default_config, parse_config
from .errors import NumericalError, ValidationError
from .gaits import (GaitSpec, commutator_schedule, format_schedule,
                    parse_schedule, shape_excursion, synthesize)
from .lie import controllability_report, lie_bracket, solve_bracket_coefficients
from .model import Configuration, ShapePoint, swimmer_fields
from .planner import (calibrate, compile_maneuvers, composite_square_gait,
                      plan_line, plan_polygon, tracking_report)
from .report import ensure_out_dir, write_plot_svg, write_trajectory_csv
from .se2 import GroupPose
from .selftest import run_acceptance
from .simulate import (convergence_probe, fit_loglog_slope, net_displacement,
                       simulate, swimmer_velocity_model)

ORIGIN = Configuration(ShapePoint(0.0, 0.0), GroupPose(0.0, 0.0, 0.0))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _load_config(path) -> RunConfig:
    if path is None:
        return default_config()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}")
    return parse_config(text)


class RunReport:
    """Command, config echo, key scalar results, and artifact paths.

    Deterministic for a fixed config and seed; also handles the printing so
    every command reports through one channel.
    """

    def __init__(self, command, cfg, quiet):
        self.command = command
        self.config_lines = config_echo(cfg)
        self.quiet = quiet
        self.scalars = {}
        self.files = []
        if not quiet:
            print(f"command: {command}")
            for line in self.config_lines:
                print(f"config: {line}")

    def scalar(self, key, value):
        self.scalars[key] = value
        print(f"{key} = {value}")

    def info(self, message):
        if not self.quiet:
            print(message)

    def artifact(self, path):
        self.files.append(path)
        print(f"wrote {path}")


def _angle_value(text):
    """Angle argument: radians, or degrees with a `deg` suffix."""
    parts = text.split()
    if len(parts) == 2 and parts[1] == "deg":
        return math.radians(float(parts[0]))
    return float(text)


def cmd_analyze(args, cfg: RunConfig, rep: RunReport) -> int:
    rng = np.random.default_rng(cfg.seed)
    n = args.grid
    angles = -math.pi + 2.0 * math.pi * np.arange(n) / n
    worst_rank = 5
    worst_ratio = math.inf
    worst_point = None
    for a1 in angles:
        for a2 in angles:
            for _ in range(args.poses):
                pose = GroupPose(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                 rng.uniform(-math.pi, math.pi))
                q = Configuration(ShapePoint(float(a1), float(a2)), pose)
                r = controllability_report(q, cfg.params, tol=args.tol,
                                           h_inner=cfg.bracket_inner_h,
                                           h_outer=cfg.bracket_outer_h)
                ratio = float(r.singular_values[-1] / r.singular_values[0])
                if r.rank < worst_rank or ratio < worst_ratio:
                    worst_point = (float(a1), float(a2))
                worst_rank = min(worst_rank, r.rank)
                worst_ratio = min(worst_ratio, ratio)
    rep.scalar("grid", f"{n}x{n} shapes x {args.poses} poses")
    rep.scalar("min_rank", worst_rank)
    rep.scalar("min_sigma_ratio", f"{worst_ratio:.3e}")
    rep.scalar("weakest_shape", f"({worst_point[0]:.3f}, {worst_point[1]:.3f})")
    if worst_rank != 5:
        raise NumericalError("rank deficiency found on the shape grid")
    return 0


def cmd_coefficients(args, cfg: RunConfig, rep: RunReport) -> int:
    print(f"{'direction':>9s} {'alpha':>14s} {'beta':>14s} {'gamma':>14s}")
    for d in ("x", "y", "theta"):
        c = solve_bracket_coefficients(d, ORIGIN, cfg.params,
                                       h_inner=cfg.bracket_inner_h,
                                       h_outer=cfg.bracket_outer_h)
        print(f"{d:>9s} {c.alpha:14.6g} {c.beta:14.6g} {c.gamma:14.6g}")
        rep.scalars[f"{d}.alpha"] = c.alpha
        rep.scalars[f"{d}.beta"] = c.beta
        rep.scalars[f"{d}.gamma"] = c.gamma
    return 0


def cmd_synthesize(args, cfg: RunConfig, rep: RunReport) -> int:
    spec = cfg.gaits[args.direction]
    schedule = synthesize(spec)
    rep.scalar("segments", len(schedule))
    rep.scalar("duration_s", f"{schedule.total_duration:.6g}")
    rep.scalar("max_joint_excursion_rad", f"{shape_excursion(schedule):.6g}")
    out = ensure_out_dir(args.out or cfg.out_dir)
    path = os.path.join(out, f"gait_{args.direction}.txt")
    comment = (f"{args.direction} gait: alpha={spec.alpha} beta={spec.beta} "
               f"gamma={spec.gamma} t={spec.t} n={spec.n} nesting={spec.nesting}")
    with open(path, "w", newline="\n") as fh:
        fh.write(format_schedule(schedule, comment=comment))
    rep.artifact(path)
    return 0


def _write_run_outputs(traj, out_dir, stem, rep, circle=None, overlay=None):
    out = ensure_out_dir(out_dir)
    csv_path = os.path.join(out, f"{stem}.csv")
    write_trajectory_csv(traj, csv_path)
    rep.artifact(csv_path)
    series = [{"x": traj.x, "y": traj.y, "label": "base link path"}]
    if overlay is not None:
        series.append(overlay)
    svg_path = os.path.join(out, f"{stem}_path.svg")
    write_plot_svg(svg_path, series, kind="path", title=f"{stem}: base-link path",
                   xlabel="x (m)", ylabel="y (m)", circle=circle)
    rep.artifact(svg_path)
    ts_path = os.path.join(out, f"{stem}_shape.svg")
    write_plot_svg(ts_path,
                   [{"x": traj.t, "y": traj.alpha1, "label": "alpha1"},
                    {"x": traj.t, "y": traj.alpha2, "label": "alpha2"}],
                   kind="time-series", title=f"{stem}: joint angles",
                   xlabel="t (s)", ylabel="angle (rad)")
    rep.artifact(ts_path)


def cmd_simulate(args, cfg: RunConfig, rep: RunReport) -> int:
    try:
        with open(args.schedule) as fh:
            schedule = parse_schedule(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read schedule {args.schedule}: {exc}")
    if len(schedule) == 0:
        raise ValidationError(f"schedule {args.schedule} contains no segments")
    traj = simulate(schedule, ORIGIN, cfg.params, cfg.integrator)
    nd = net_displacement(traj)
    rep.scalar("samples", len(traj))
    rep.scalar("net_dx_m", f"{nd.delta.x:.9g}")
    rep.scalar("net_dy_m", f"{nd.delta.y:.9g}")
    rep.scalar("net_dtheta_rad", f"{nd.delta.theta:.9g}")
    rep.scalar("shape_closure", f"{nd.shape_closure:.3e}")
    stem = os.path.splitext(os.path.basename(args.schedule))[0]
    stride = max(1, len(traj) // 20000)
    _write_run_outputs(traj.decimate(stride), args.out or cfg.out_dir,
                       f"sim_{stem}", rep)
    return 0


def cmd_probe(args, cfg: RunConfig, rep: RunReport) -> int:
    params = cfg.params
    model = swimmer_velocity_model(params)
    if args.kind == "commutator":
        g1, g2 = swimmer_fields(params)
        reference = lie_bracket(g1, g2, ORIGIN, h=cfg.bracket_h)
        probe = convergence_probe(lambda e: commutator_schedule(1, 2, e * e),
                                  [0.2, 0.1, 0.05, 0.025], reference, ORIGIN,
                                  model, cfg.integrator)
        for eps, err in probe.rows():
            print(f"eps = {eps:<8g} error = {err:.6e}")
        rep.scalar("slope", f"{probe.slope:.3f}")
        rep.scalar("monotone", probe.monotone)
    elif args.kind == "variants":
        ladder = [0.2, 0.1, 0.05, 0.025]
        nets = {v: [] for v in range(4)}
        for v in range(4):
            for eps in ladder:
                traj = simulate(commutator_schedule(1, 2, eps * eps, variant=v),
                                ORIGIN, params, cfg.integrator)
                d = net_displacement(traj).delta
                nets[v].append(np.array([d.x, d.y, d.theta]))
        slopes = []
        for i in range(4):
            for j in range(i + 1, 4):
                diffs = [float(np.linalg.norm(nets[i][k] - nets[j][k]))
                         for k in range(len(ladder))]
                slope = fit_loglog_slope(ladder, diffs)
                slopes.append(slope)
                print(f"variants {i}/{j}: difference slope {slope:.3f}")
        rep.scalar("min_slope", f"{min(slopes):.3f}")
    else:  # leakage
        for nesting in ("derived", "literal"):
            ratios = []
            for n in (1, 2, 4):
                spec = GaitSpec(1.0, 0.0, 0.0, t=1.0, n=n, nesting=nesting)
                traj = simulate(synthesize(spec), ORIGIN, params, cfg.integrator)
                d = net_displacement(traj).delta
                ratios.append((abs(d.y) + abs(d.theta)) / abs(d.x))
            print(f"nesting {nesting}: leakage ratios over n=1,2,4: "
                  + ", ".join(f"{r:.4f}" for r in ratios))
            rep.scalars[f"leakage_{nesting}"] = ratios
            rep.scalar(f"monotone_{nesting}", ratios[0] > ratios[1] > ratios[2])
    return 0


def _calibration(cfg: RunConfig, rep: RunReport):
    specs = dict(cfg.gaits)
    if cfg.x_composite:
        specs["x"] = composite_square_gait(cfg.gaits["x"].t,
                                           scale=cfg.gaits["x"].alpha)
    calib = calibrate(cfg.params, specs, cfg.integrator)
    for d, entry in calib.entries.items():
        rep.info(f"calibration {d}: per-cycle delta = "
                 f"({entry.delta[0]:.6g}, {entry.delta[1]:.6g}, {entry.delta[2]:.6g}), "
                 f"duration {entry.duration:.3g}s, dominance {entry.dominance:.1f}")
    return calib


def cmd_plan_line(args, cfg: RunConfig, rep: RunReport) -> int:
    bearing = args.bearing if args.bearing is not None else cfg.line_bearing
    distance = args.distance if args.distance is not None else cfg.line_distance
    target = (distance * math.cos(bearing), distance * math.sin(bearing))
    calib = _calibration(cfg, rep)
    maneuvers = plan_line(GroupPose(0.0, 0.0, 0.0), target, calib)
    rep.scalar("rotate_deg", f"{math.degrees(maneuvers[0].magnitude):.6g}")
    rep.scalar("translate_m", f"{maneuvers[1].magnitude:.6g}")
    compiled = compile_maneuvers(maneuvers, calib)
    for span in compiled.spans:
        rep.scalar(f"{span.maneuver.kind}_cycles", span.cycles)
        rep.scalar(f"{span.maneuver.kind}_residual", f"{span.residual:.4g}")
    for w in compiled.warnings:
        rep.info(f"warning: {w}")
    traj = simulate(compiled.schedule, ORIGIN, cfg.params, cfg.integrator)
    final = traj.final_pose
    err = math.hypot(final.x - target[0], final.y - target[1])
    rep.scalar("final_pose", f"({final.x:.6g}, {final.y:.6g}, {final.theta:.6g})")
    rep.scalar("target_error_m", f"{err:.6g}")
    out = args.out or cfg.out_dir
    stride = max(1, len(traj) // 20000)
    overlay = {"x": [0.0, target[0]], "y": [0.0, target[1]], "label": "planned line"}
    _write_run_outputs(traj.decimate(stride), out, "plan_line", rep, overlay=overlay)
    sched_path = os.path.join(ensure_out_dir(out), "plan_line_schedule.txt")
    with open(sched_path, "w", newline="\n") as fh:
        fh.write(format_schedule(compiled.schedule, comment="compiled line plan"))
    rep.artifact(sched_path)
    return 0


def cmd_plan_circle(args, cfg: RunConfig, rep: RunReport) -> int:
    radius = args.radius if args.radius is not None else cfg.circle_radius
    sides = args.sides if args.sides is not None else cfg.circle_sides
    calib = _calibration(cfg, rep)
    plan = plan_polygon((0.0, 0.0), radius, sides, calib)
    rep.scalar("side_length_m", f"{plan.side_length:.6g}")
    rep.scalar("turn_deg", f"{math.degrees(plan.turn):.6g}")
    compiled = compile_maneuvers(plan.maneuvers, calib)
    rep.scalar("segments", len(compiled.schedule))
    rep.scalar("schedule_duration_s", f"{compiled.schedule.total_duration:.6g}")
    for w in compiled.warnings:
        rep.info(f"warning: {w}")
    q0 = Configuration(ShapePoint(0.0, 0.0), plan.start_pose)
    traj = simulate(compiled.schedule, q0, cfg.params, cfg.integrator)
    track = tracking_report(plan.path, traj, compiled)
    rep.scalar("mean_waypoint_error_m", f"{track.mean_error:.6g}")
    rep.scalar("max_waypoint_error_m", f"{track.max_error:.6g}")
    rep.scalar("closure_error_m", f"{track.closure_error:.6g}")
    rep.scalar("fit_radius_m", f"{track.fit_radius:.6g}")
    rep.scalar("fit_center", f"({track.fit_center[0]:.6g}, {track.fit_center[1]:.6g})")
    out = args.out or cfg.out_dir
    stride = max(1, len(traj) // 50000)
    px = [p[0] for p in plan.path.points]
    py = [p[1] for p in plan.path.points]
    overlay = {"x": px, "y": py, "label": "planned polygon"}
    circle = (track.fit_center[0], track.fit_center[1], track.fit_radius)
    _write_run_outputs(traj.decimate(stride), out, "plan_circle", rep,
                       circle=circle, overlay=overlay)
    sched_path = os.path.join(ensure_out_dir(out), "plan_circle_schedule.txt")
    with open(sched_path, "w", newline="\n") as fh:
        fh.write(format_schedule(compiled.schedule, comment="compiled polygon plan"))
    rep.artifact(sched_path)
    return 0


def cmd_selftest(args, cfg: RunConfig, rep: RunReport) -> int:
    results = run_acceptance(args.only or None)
    failed = 0
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        print(f"{tag} {r.name}: {r.detail}")
        if not r.passed:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} acceptance checks passed")
    return 0 if failed == 0 else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="purcell",
                     description="3-link low-Reynolds swimmer: simulation, "
                                 "gait synthesis, and open-loop planning")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key = value config file")
    common.add_argument("--out", help="output directory (overrides run.out)")
    common.add_argument("--quiet", action="store_true",
                        help="suppress config echo and informational lines")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common],
                       help="controllability rank over a shape grid")
    p.add_argument("--grid", type=int, default=12)
    p.add_argument("--poses", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("coefficients", parents=[common], help="bracket coefficients per group direction")
    p.set_defaults(func=cmd_coefficients)

    p = sub.add_parser("synthesize", parents=[common], help="expand a gait spec into a schedule file")
    p.add_argument("--direction", choices=("x", "y", "theta"), required=True)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("simulate", parents=[common], help="integrate a schedule file")
    p.add_argument("--schedule", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("probe", parents=[common], help="convergence ladders")
    p.add_argument("--kind", choices=("commutator", "variants", "leakage"),
                   default="commutator")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("plan-line", parents=[common], help="rotate+translate to a line target")
    p.add_argument("--bearing", type=_angle_value, default=None,
                   help="target bearing in rad (append ' deg' for degrees)")
    p.add_argument("--distance", type=float, default=None, help="line length (m)")
    p.set_defaults(func=cmd_plan_line)

    p = sub.add_parser("plan-circle", parents=[common], help="track a circle as a polygon")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--sides", type=int, default=None)
    p.set_defaults(func=cmd_plan_circle)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", nargs="*", help="run only checks matching these names")
    p.set_defaults(func=cmd_selftest)

    return parser


def dispatch(argv=None):
    """Parse and run one command; returns (exit code, RunReport or None)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    rep = None
    try:
        cfg = _load_config(args.config)
        rep = RunReport(args.command, cfg, args.quiet)
        return args.func(args, cfg, rep), rep
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, rep
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2, rep


def main(argv=None) -> int:
    code, _ = dispatch(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
