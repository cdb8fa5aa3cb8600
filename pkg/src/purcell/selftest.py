"""Acceptance checks runnable from the CLI (`purcell selftest`) and pytest.

Each check returns a CheckResult with the measured numbers in `detail`; the
tolerances are fixed here and nowhere else.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .gaits import GaitSpec, commutator_schedule, synthesize
from .lie import controllability_report, lie_bracket, solve_bracket_coefficients
from .model import (Configuration, ShapePoint, ShapeVelocity, SwimmerParams,
                    body_velocity, default_params, swimmer_fields)
from .oracle import reference_body_velocity
from .planner import (calibrate, compile_maneuvers, default_planner_specs,
                      plan_line, plan_polygon, tracking_report)
from .se2 import GroupPose, compose, wrap_angle
from .simulate import (IntegratorConfig, convergence_probe, fit_loglog_slope,
                       net_displacement, simulate, swimmer_velocity_model)

ORIGIN = Configuration(ShapePoint(0.0, 0.0), GroupPose(0.0, 0.0, 0.0))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


def _result(name, passed, detail, start):
    return CheckResult(name, bool(passed), detail, time.time() - start)


def _random_params(rng) -> SwimmerParams:
    L = rng.uniform(0.02, 0.12)
    b = L * rng.uniform(0.05, 0.5)
    k_long = rng.uniform(0.5, 5.0)
    k_lat = k_long * rng.uniform(1.2, 3.0)
    return SwimmerParams(L=L, b=b, mu=rng.uniform(0.1, 2.0),
                         k_long=k_long, k_lat=k_lat)


def check_controllability_rank(seed: int = 1234) -> CheckResult:
    """Rank 5 on a 12x12 shape grid with 3 random poses each, under 10 s."""
    start = time.time()
    params = default_params()
    rng = np.random.default_rng(seed)
    angles = -math.pi + 2.0 * math.pi * np.arange(12) / 12.0
    worst_rank, worst_sigma = 5, math.inf
    for a1 in angles:
        for a2 in angles:
            for _ in range(3):
                pose = GroupPose(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                 rng.uniform(-math.pi, math.pi))
                q = Configuration(ShapePoint(float(a1), float(a2)), pose)
                rep = controllability_report(q, params, tol=1e-8)
                if rep.rank < worst_rank:
                    worst_rank = rep.rank
                ratio = rep.singular_values[-1] / rep.singular_values[0]
                worst_sigma = min(worst_sigma, ratio)
    elapsed = time.time() - start
    passed = worst_rank == 5 and elapsed < 10.0
    return _result("controllability_rank",
                   passed,
                   f"min rank {worst_rank}/5 over 432 points, "
                   f"min sigma5/sigma1 {worst_sigma:.2e}, {elapsed:.1f}s (limit 10s)",
                   start)


def _pattern_residuals(params: SwimmerParams):
    coeffs = {d: solve_bracket_coefficients(d, ORIGIN, params)
              for d in ("x", "y", "theta")}
    cx, cy, ct = coeffs["x"], coeffs["y"], coeffs["theta"]
    res = {
        "x": max(abs(cx.beta), abs(cx.gamma)) / abs(cx.alpha),
        "y": max(abs(cy.alpha), abs(cy.beta + cy.gamma)) / abs(cy.beta),
        "theta": max(abs(ct.alpha), abs(ct.beta - ct.gamma)) / abs(ct.beta),
    }
    return res, coeffs


def check_coefficient_pattern(seed: int = 1234) -> CheckResult:
    """Zero/sign pattern of the bracket coefficients at the straight shape.

    x needs beta, gamma ~ 0; y needs alpha ~ 0 and beta = -gamma; theta needs
    alpha ~ 0 and beta = gamma, all to 1e-6 relative, for the default and 20
    random parameter sets.
    """
    start = time.time()
    rng = np.random.default_rng(seed)
    worst = 0.0
    params_list = [default_params()] + [_random_params(rng) for _ in range(20)]
    for params in params_list:
        res, _ = _pattern_residuals(params)
        worst = max(worst, *res.values())
    passed = worst < 1e-6
    return _result("coefficient_zero_pattern", passed,
                   f"worst pattern residual {worst:.2e} over "
                   f"{len(params_list)} parameter sets (tol 1e-6)", start)


def check_commutator_convergence() -> CheckResult:
    """Square-gait displacement vs eps^2 [g1,g2]: slope >= 2.7, under 30 s."""
    start = time.time()
    params = default_params()
    g1, g2 = swimmer_fields(params)
    reference = lie_bracket(g1, g2, ORIGIN)
    cfg = IntegratorConfig(h=1e-3, min_substeps=16)
    rep = convergence_probe(
        lambda eps: commutator_schedule(1, 2, eps * eps),
        [0.2, 0.1, 0.05, 0.025], reference, ORIGIN,
        swimmer_velocity_model(params), cfg)
    elapsed = time.time() - start
    passed = rep.slope >= 2.7 and elapsed < 30.0
    table = ", ".join(f"{e:.0e}" for e in rep.errors)
    return _result("commutator_convergence", passed,
                   f"slope {rep.slope:.2f} (need >= 2.7), errors [{table}], "
                   f"{elapsed:.1f}s (limit 30s)", start)


def check_variant_equivalence() -> CheckResult:
    """Pairwise displacement differences of the 4 square variants: slope >= 2.7."""
    start = time.time()
    params = default_params()
    cfg = IntegratorConfig(h=1e-3, min_substeps=16)
    ladder = [0.2, 0.1, 0.05, 0.025]
    nets = {}
    for variant in range(4):
        nets[variant] = []
        for eps in ladder:
            traj = simulate(commutator_schedule(1, 2, eps * eps, variant=variant),
                            ORIGIN, params, cfg)
            d = net_displacement(traj).delta
            nets[variant].append(np.array([d.x, d.y, d.theta]))
    slopes = []
    for i in range(4):
        for j in range(i + 1, 4):
            diffs = [float(np.linalg.norm(nets[i][k] - nets[j][k]))
                     for k in range(len(ladder))]
            slopes.append(fit_loglog_slope(ladder, diffs))
    passed = min(slopes) >= 2.7
    return _result("gait_variant_equivalence", passed,
                   f"pairwise slopes {[f'{s:.2f}' for s in slopes]} (need >= 2.7)",
                   start)


def check_leakage_decay() -> CheckResult:
    """x-direction synthesis at fixed t: leakage ratio decreasing over n in {1,2,4}."""
    start = time.time()
    params = default_params()
    cfg = IntegratorConfig(h=1e-3, min_substeps=16)
    ratios = []
    for n in (1, 2, 4):
        spec = GaitSpec(1.0, 0.0, 0.0, t=1.0, n=n)
        traj = simulate(synthesize(spec), ORIGIN, params, cfg)
        d = net_displacement(traj).delta
        ratios.append((abs(d.y) + abs(d.theta)) / abs(d.x))
    elapsed = time.time() - start
    passed = ratios[0] > ratios[1] > ratios[2] and elapsed < 120.0
    return _result("leakage_decay_in_n", passed,
                   f"ratios {[f'{r:.3f}' for r in ratios]} for n=1,2,4, "
                   f"{elapsed:.1f}s (limit 120s)", start)


def _random_schedule(rng):
    from .gaits import ControlSchedule, ControlSegment
    segs = []
    for _ in range(rng.integers(4, 7)):
        segs.append(ControlSegment(int(rng.integers(1, 3)),
                                   float(rng.uniform(-2.0, 2.0)),
                                   float(rng.uniform(0.3, 1.2))))
    return ControlSchedule(tuple(segs))


def check_integrator() -> CheckResult:
    """RK4 self-convergence order >= 3.7 on 10 random schedules and
    group-equivariance residual < 1e-9."""
    start = time.time()
    params = default_params()
    rng = np.random.default_rng(7)
    orders = []
    for _ in range(10):
        sched = _random_schedule(rng)
        finals = []
        # h larger than any segment so min_substeps alone sets the step,
        # making the substep exactly halve across the ladder
        for substeps in (8, 16, 32):
            cfg = IntegratorConfig(h=10.0, min_substeps=substeps)
            traj = simulate(sched, ORIGIN, params, cfg)
            finals.append(np.array([traj.x[-1], traj.y[-1], traj.theta[-1]]))
        d1 = np.linalg.norm(finals[0] - finals[1])
        d2 = np.linalg.norm(finals[1] - finals[2])
        orders.append(math.log2(d1 / d2) if d2 > 0 else 4.0)

    worst_equiv = 0.0
    cfg = IntegratorConfig(h=5e-3, min_substeps=4)
    for _ in range(5):
        sched = _random_schedule(rng)
        g0 = GroupPose(rng.uniform(-1, 1), rng.uniform(-1, 1),
                       rng.uniform(-math.pi, math.pi))
        base = simulate(sched, ORIGIN, params, cfg)
        moved = simulate(sched, Configuration(ShapePoint(0.0, 0.0), g0), params, cfg)
        expect = compose(g0, base.final_pose)
        got = moved.final_pose
        err = math.hypot(expect.x - got.x, expect.y - got.y) + \
            abs(wrap_angle(expect.theta - got.theta))
        worst_equiv = max(worst_equiv, err)

    passed = min(orders) >= 3.7 and worst_equiv < 1e-9
    return _result("integrator_convergence", passed,
                   f"min RK4 order {min(orders):.2f} (need >= 3.7), "
                   f"equivariance residual {worst_equiv:.2e} (tol 1e-9)", start)


def check_schedule_closure() -> CheckResult:
    """Synthesized schedules close: channel integrals < 1e-12 and simulated
    shape closure < 1e-10."""
    start = time.time()
    params = default_params()
    cfg = IntegratorConfig(h=5e-3, min_substeps=4)
    specs = []
    for nesting in ("derived", "literal"):
        for n in (1, 2):
            specs += [GaitSpec(1.0, 0.0, 0.0, t=0.5, n=n, nesting=nesting),
                      GaitSpec(0.0, -1.0, 1.0, t=0.5, n=n, nesting=nesting),
                      GaitSpec(0.0, 1.0, 1.0, t=0.5, n=n, nesting=nesting),
                      GaitSpec(0.7, -1.3, 0.4, t=0.8, n=n, nesting=nesting)]
    worst_integral, worst_closure = 0.0, 0.0
    for spec in specs:
        sched = synthesize(spec)
        worst_integral = max(worst_integral,
                             abs(sched.channel_integral(1)),
                             abs(sched.channel_integral(2)))
        traj = simulate(sched, ORIGIN, params, cfg)
        worst_closure = max(worst_closure, net_displacement(traj).shape_closure)
    passed = worst_integral < 1e-12 and worst_closure < 1e-10
    return _result("schedule_closure", passed,
                   f"worst channel integral {worst_integral:.2e} (tol 1e-12), "
                   f"worst shape closure {worst_closure:.2e} (tol 1e-10) "
                   f"over {len(specs)} schedules", start)


def check_polygon_tracking() -> CheckResult:
    """Compiled 10-gon of radius 0.2 m tracked open loop: best-fit radius
    within 15 %, closure under 25 % of the circumference, under 5 min."""
    start = time.time()
    params = default_params()
    cfg = IntegratorConfig(h=2.5e-3, min_substeps=16)
    calib = calibrate(params, default_planner_specs(), cfg)
    plan = plan_polygon((0.0, 0.0), 0.2, 10, calib)
    compiled = compile_maneuvers(plan.maneuvers, calib)
    q0 = Configuration(ShapePoint(0.0, 0.0), plan.start_pose)
    traj = simulate(compiled.schedule, q0, params, cfg)
    rep = tracking_report(plan.path, traj, compiled)
    elapsed = time.time() - start
    bound = 0.25 * 2.0 * math.pi * 0.2
    radius_ok = abs(rep.fit_radius - 0.2) <= 0.15 * 0.2
    closure_ok = rep.closure_error < bound
    passed = radius_ok and closure_ok and elapsed < 300.0
    return _result("polygon_tracking", passed,
                   f"fit radius {rep.fit_radius:.4f} m (target 0.2 +-15%), "
                   f"closure {rep.closure_error:.4f} m (bound {bound:.4f}), "
                   f"{elapsed:.0f}s (limit 300s)", start)


def check_line_planning() -> CheckResult:
    """Bearing 154 deg from identity heading plans a 26 deg rotation."""
    start = time.time()
    bearing = math.radians(154.0)
    target = (0.12 * math.cos(bearing), 0.12 * math.sin(bearing))
    maneuvers = plan_line(GroupPose(0.0, 0.0, 0.0), target)
    rot = maneuvers[0]
    trans = maneuvers[1]
    angle_err = abs(abs(math.degrees(rot.magnitude)) - 26.0)
    passed = (rot.kind == "rotate" and trans.kind == "translate"
              and angle_err < 1e-9 and abs(rot.magnitude) <= math.pi / 2
              and abs(abs(trans.magnitude) - 0.12) < 1e-12)
    return _result("line_planning_angle", passed,
                   f"rotation {math.degrees(rot.magnitude):+.3f} deg "
                   f"(need magnitude 26), translate {trans.magnitude:+.3f} m", start)


def check_oracle_equivalence(seed: int = 1234) -> CheckResult:
    """Kinematic body velocity vs the dense force-balance oracle, 100 pairs."""
    start = time.time()
    params = default_params()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        shape = ShapePoint(*rng.uniform(-math.pi, math.pi, 2))
        sdot = ShapeVelocity(*rng.uniform(-2.0, 2.0, 2))
        xi = np.array(body_velocity(shape, sdot, params))
        ref = reference_body_velocity(shape, sdot, params)
        worst = max(worst, float(np.max(np.abs(xi - ref))))
    passed = worst < 1e-8
    return _result("oracle_equivalence", passed,
                   f"worst |model - oracle| {worst:.2e} over 100 pairs (tol 1e-8)",
                   start)


def check_boundedness() -> CheckResult:
    """1e6 integration steps under constant controls: finite pose, shape on torus."""
    start = time.time()
    params = default_params()
    from .gaits import ControlSchedule, ControlSegment
    h = 1e-3
    sched = ControlSchedule((ControlSegment(1, 0.9, 500.0),
                             ControlSegment(2, -0.7, 500.0)))
    cfg = IntegratorConfig(h=h, min_substeps=1)
    traj = simulate(sched, ORIGIN, params, cfg)
    steps = len(traj) - 1
    finite = all(np.all(np.isfinite(col)) for col in
                 (traj.x, traj.y, traj.theta, traj.alpha1, traj.alpha2,
                  traj.xi_x, traj.xi_y, traj.xi_theta))
    on_torus = bool(np.max(np.abs(traj.alpha1)) <= math.pi
                    and np.max(np.abs(traj.alpha2)) <= math.pi)
    passed = finite and on_torus and steps >= 10 ** 6
    return _result("long_horizon_boundedness", passed,
                   f"{steps} steps, finite={finite}, wrapped shapes on torus={on_torus}",
                   start)


ALL_CHECKS = (
    check_controllability_rank,
    check_coefficient_pattern,
    check_commutator_convergence,
    check_variant_equivalence,
    check_leakage_decay,
    check_integrator,
    check_schedule_closure,
    check_polygon_tracking,
    check_line_planning,
    check_oracle_equivalence,
    check_boundedness,
)


def run_acceptance(names=None) -> list:
    """Run the acceptance checks, optionally filtered by substring names."""
    results = []
    for check in ALL_CHECKS:
        label = check.__name__.removeprefix("check_")
        if names and not any(n in label for n in names):
            continue
        results.append(check())
    return results
