"""Waypoint planning with calibrated rotate/translate maneuvers.

The planner never uses feedback: each basis gait is simulated once from the
straight shape to measure its per-cycle displacement, and maneuvers are then
compiled to whole numbers of cycles.  Rounding residuals are reported, not
compensated.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .gaits import (ControlSchedule, GaitSpec, commutator_schedule, concatenate,
                    repeat, reverse_schedule, synthesize)
from .model import Configuration, ShapePoint, SwimmerParams
from .se2 import GroupPose, wrap_angle
from .simulate import IntegratorConfig, Trajectory, net_displacement, simulate

MIN_DOMINANCE = 2.0


@dataclass(frozen=True)
class Maneuver:
    kind: str         # "rotate" or "translate"
    magnitude: float  # radians or meters, signed


@dataclass(frozen=True)
class CalibrationEntry:
    direction: str
    schedule: ControlSchedule
    delta: tuple            # per-cycle (dx, dy, dtheta) in the starting body frame
    duration: float         # seconds per cycle
    dominance: float
    spec: GaitSpec = None

    @property
    def per_cycle(self) -> float:
        return self.delta[2] if self.direction == "theta" else self.delta[0]


@dataclass(frozen=True)
class CalibrationTable:
    entries: dict
    char_length: float

    def __getitem__(self, direction: str) -> CalibrationEntry:
        return self.entries[direction]


@dataclass(frozen=True)
class WaypointPath:
    points: tuple              # ((x, y), ...)
    headings: tuple = None     # optional per-waypoint heading

    def __post_init__(self):
        for a, b in zip(self.points, self.points[1:]):
            if math.hypot(b[0] - a[0], b[1] - a[1]) == 0.0:
                raise ValidationError("consecutive waypoints must be distinct")


@dataclass(frozen=True)
class ManeuverSpan:
    maneuver: Maneuver
    cycles: int          # signed; negative means the reversed gait was used
    first_segment: int   # index range in the compiled schedule, empty if cycles == 0
    last_segment: int
    residual: float


@dataclass(frozen=True)
class CompiledPlan:
    schedule: ControlSchedule
    spans: tuple
    warnings: tuple


@dataclass(frozen=True)
class PolygonPlan:
    path: WaypointPath
    maneuvers: list
    start_pose: GroupPose
    side_length: float
    turn: float
    center: tuple
    radius: float


@dataclass(frozen=True)
class TrackingReport:
    waypoint_errors: tuple
    mean_error: float
    max_error: float
    closure_error: float
    achieved: tuple
    fit_center: tuple = None
    fit_radius: float = None


def composite_square_gait(tau: float, scale: float = 1.0) -> ControlSchedule:
    """All four cyclic square-gait variants back to back.

    The variants share the same leading bracket motion while their
    third-order leakage largely cancels, which makes this the translation
    gait of choice.
    """
    return concatenate([commutator_schedule(1, 2, tau, scale_a=scale, variant=v)
                        for v in range(4)])


def build_basis_schedule(spec, composite: bool = False) -> ControlSchedule:
    """A per-cycle schedule from a GaitSpec, or pass a schedule through."""
    if isinstance(spec, ControlSchedule):
        return spec
    if composite:
        if spec.beta != 0.0 or spec.gamma != 0.0:
            raise ValidationError("composite gaits are only defined for the first-bracket spec")
        return composite_square_gait(spec.t, scale=spec.alpha)
    return synthesize(spec)


def default_planner_specs() -> dict:
    """Basis gaits tuned for maneuver compilation at the default parameters."""
    return {
        "x": composite_square_gait(0.25),
        "y": GaitSpec(0.0, -1.0, 1.0, t=0.0625, n=2),
        "theta": GaitSpec(0.0, 1.0, 1.0, t=0.0625, n=1),
    }


def calibrate(params: SwimmerParams, specs: dict,
              cfg: IntegratorConfig = IntegratorConfig(),
              char_length: float = None,
              min_dominance: float = MIN_DOMINANCE) -> CalibrationTable:
    """Measure per-cycle displacement of each basis gait from the straight shape.

    Rejects gaits whose principal displacement fails to dominate the
    cross-leakage by `min_dominance`; such a gait cannot be compiled into
    maneuvers.  Angles and lengths are compared through `char_length`
    (default: the 6L span of the swimmer).
    """
    if char_length is None:
        char_length = 6.0 * params.L
    q0 = Configuration(ShapePoint(0.0, 0.0), GroupPose(0.0, 0.0, 0.0))
    entries = {}
    for direction, spec in specs.items():
        if direction not in ("x", "y", "theta"):
            raise ValidationError(f"unknown gait direction {direction!r}")
        schedule = build_basis_schedule(spec)
        traj = simulate(schedule, q0, params, cfg)
        nd = net_displacement(traj)
        if nd.shape_closure > 1e-8:
            raise ValidationError(
                f"{direction} gait does not close its shape loop "
                f"(closure {nd.shape_closure:.2e})")
        d = (nd.delta.x, nd.delta.y, nd.delta.theta)
        scaled = (d[0], d[1], char_length * d[2])
        idx = 2 if direction == "theta" else (0 if direction == "x" else 1)
        cross = max(abs(scaled[j]) for j in range(3) if j != idx)
        principal = abs(scaled[idx])
        if principal == 0.0:
            raise ValidationError(f"{direction} gait produces no net motion")
        dominance = math.inf if cross == 0.0 else principal / cross
        if dominance < min_dominance:
            raise ValidationError(
                f"{direction} gait dominance {dominance:.2f} below {min_dominance}; "
                "unusable for maneuver compilation")
        entries[direction] = CalibrationEntry(
            direction=direction,
            schedule=schedule,
            delta=d,
            duration=schedule.total_duration,
            dominance=dominance,
            spec=spec if isinstance(spec, GaitSpec) else None,
        )
    return CalibrationTable(entries=entries, char_length=char_length)


def plan_line(start: GroupPose, target: tuple, calib: CalibrationTable = None) -> list:
    """[Rotate, Translate] reaching `target` from `start`.

    The heading is aligned with the bearing modulo pi, taking the rotation
    with |dtheta| <= pi/2 and signing the translation to match.
    """
    dx = target[0] - start.x
    dy = target[1] - start.y
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        raise ValidationError("target coincides with the start position")
    bearing = math.atan2(dy, dx)
    delta = wrap_angle(bearing - start.theta)
    if abs(delta) <= 0.5 * math.pi:
        rotation, distance = delta, dist
    else:
        rotation = wrap_angle(delta - math.copysign(math.pi, delta))
        distance = -dist
    return [Maneuver("rotate", rotation), Maneuver("translate", distance)]


def plan_polygon(center: tuple, radius: float, sides: int,
                 calib: CalibrationTable = None) -> PolygonPlan:
    """Regular polygon tracking plan: per vertex, rotate by the exterior
    angle and translate one side length.
    """
    if sides < 3:
        raise ValidationError("polygon needs at least 3 sides")
    if not radius > 0:
        raise ValidationError("radius must be positive")
    turn = 2.0 * math.pi / sides
    side = 2.0 * radius * math.sin(math.pi / sides)
    vertices = []
    for k in range(sides + 1):
        phi = turn * k
        vertices.append((center[0] + radius * math.cos(phi),
                         center[1] + radius * math.sin(phi)))
    # heading along side k is the bearing v_k -> v_{k+1}; the first rotate
    # must bring the start heading onto side 0
    first_bearing = math.atan2(vertices[1][1] - vertices[0][1],
                               vertices[1][0] - vertices[0][0])
    start_pose = GroupPose(vertices[0][0], vertices[0][1],
                           wrap_angle(first_bearing - turn))
    maneuvers = []
    for _ in range(sides):
        maneuvers.append(Maneuver("rotate", turn))
        maneuvers.append(Maneuver("translate", side))
    return PolygonPlan(path=WaypointPath(tuple(vertices)), maneuvers=maneuvers,
                       start_pose=start_pose, side_length=side, turn=turn,
                       center=tuple(center), radius=radius)


def compile_maneuvers(maneuvers: list, calib: CalibrationTable) -> CompiledPlan:
    """Expand maneuvers into whole cycles of the calibrated gaits.

    Each maneuver becomes round(magnitude / per-cycle) repetitions; negative
    counts use the time-reversed gait (the exact inverse flow).  Residuals
    stay in the spans.
    """
    for direction in ("x", "theta"):
        if direction not in calib.entries:
            raise ValidationError(f"calibration table lacks the {direction} gait")
        if calib[direction].dominance < MIN_DOMINANCE:
            raise ValidationError(f"{direction} gait dominance below {MIN_DOMINANCE}")

    segs = []
    spans = []
    warnings = []
    for m in maneuvers:
        entry = calib["theta"] if m.kind == "rotate" else calib["x"]
        if m.kind not in ("rotate", "translate"):
            raise ValidationError(f"unknown maneuver kind {m.kind!r}")
        quantum = entry.per_cycle
        cycles = round(m.magnitude / quantum)
        residual = m.magnitude - cycles * quantum
        if cycles == 0:
            if m.magnitude != 0.0:
                warnings.append(
                    f"{m.kind} {m.magnitude:+.4g} smaller than half a cycle "
                    f"({quantum:+.4g}); emitted no segments")
            spans.append(ManeuverSpan(m, 0, len(segs), len(segs) - 1, residual))
            continue
        block = entry.schedule if cycles > 0 else reverse_schedule(entry.schedule)
        start = len(segs)
        segs.extend(repeat(block, abs(cycles)).segments)
        spans.append(ManeuverSpan(m, cycles, start, len(segs) - 1, residual))
    return CompiledPlan(schedule=ControlSchedule(tuple(segs)),
                        spans=tuple(spans), warnings=tuple(warnings))


def fit_circle(points) -> tuple:
    """Least-squares circle (algebraic form); exact on noiseless circle points."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise ValidationError("circle fit needs at least 3 points")
    A = np.column_stack([pts[:, 0], pts[:, 1], np.ones(len(pts))])
    rhs = pts[:, 0] ** 2 + pts[:, 1] ** 2
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    cx, cy = 0.5 * sol[0], 0.5 * sol[1]
    r_sq = sol[2] + cx * cx + cy * cy
    if r_sq <= 0.0:
        raise NumericalError("degenerate circle fit")
    return (float(cx), float(cy), float(math.sqrt(r_sq)))


def _maneuver_end_positions(traj: Trajectory, plan: CompiledPlan):
    """Pose position at the last sample of each translate maneuver."""
    positions = []
    seg_ids = traj.segment
    for span in plan.spans:
        if span.maneuver.kind != "translate":
            continue
        idx = np.flatnonzero(seg_ids <= span.last_segment)
        i = int(idx[-1]) if len(idx) else 0
        positions.append((float(traj.x[i]), float(traj.y[i])))
    return positions


def tracking_report(path: WaypointPath, traj: Trajectory,
                    plan: CompiledPlan = None, fit: bool = None) -> TrackingReport:
    """Per-waypoint position errors of a tracked path.

    With a compiled plan, each waypoint after the first is matched to the end
    of its translate maneuver; without one, to the nearest trajectory sample.
    """
    targets = list(path.points[1:])
    if plan is not None:
        achieved = _maneuver_end_positions(traj, plan)
        if len(achieved) != len(targets):
            raise ValidationError(
                f"plan has {len(achieved)} translate maneuvers for {len(targets)} waypoints")
        errors = [math.hypot(a[0] - t[0], a[1] - t[1])
                  for a, t in zip(achieved, targets)]
    else:
        xs, ys = traj.x, traj.y
        achieved, errors = [], []
        for t in targets:
            d = np.hypot(xs - t[0], ys - t[1])
            i = int(np.argmin(d))
            achieved.append((float(xs[i]), float(ys[i])))
            errors.append(float(d[i]))
    closure = math.hypot(float(traj.x[-1]) - path.points[-1][0],
                         float(traj.y[-1]) - path.points[-1][1])
    report = TrackingReport(
        waypoint_errors=tuple(errors),
        mean_error=float(np.mean(errors)),
        max_error=float(np.max(errors)),
        closure_error=closure,
        achieved=tuple(achieved),
    )
    if fit is None:
        fit = len(achieved) >= 3
    if fit and len(achieved) >= 3:
        cx, cy, r = fit_circle(achieved)
        report = TrackingReport(**{**report.__dict__,
                                   "fit_center": (cx, cy), "fit_radius": r})
    return report
