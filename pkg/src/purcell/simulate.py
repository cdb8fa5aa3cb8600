"""Trajectory integration of schedules and the convergence probes built on it.

Joint angles evolve exactly linearly within a segment (their rates are the
controls); the pose is advanced by classical RK4 on (x, y, theta) using the
world rate of the body velocity at each stage.  Samples are recorded at every
substep boundary.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError
from .gaits import ControlSchedule
from .model import Configuration, ShapePoint, SwimmerParams, validate_params
from .model import body_velocity_components
from .se2 import GroupPose, BodyVelocity, compose, inverse, torus_distance, wrap_angle


class IntegratorConfig(NamedTuple):
    h: float = 1e-3           # max substep (s)
    min_substeps: int = 16    # per segment


class TrajectorySample(NamedTuple):
    time: float
    shape: ShapePoint
    pose: GroupPose
    body_velocity: BodyVelocity
    segment: int


class NetDisplacement(NamedTuple):
    delta: GroupPose       # final pose in the initial body frame
    shape_closure: float   # torus distance between first and last shape


@dataclass
class Trajectory:
    t: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    xi_x: np.ndarray
    xi_y: np.ndarray
    xi_theta: np.ndarray
    segment: np.ndarray
    warning: str = ""

    def __len__(self):
        return len(self.t)

    def sample(self, i: int) -> TrajectorySample:
        return TrajectorySample(
            float(self.t[i]),
            ShapePoint(float(self.alpha1[i]), float(self.alpha2[i])),
            GroupPose(float(self.x[i]), float(self.y[i]), float(self.theta[i])),
            BodyVelocity(float(self.xi_x[i]), float(self.xi_y[i]), float(self.xi_theta[i])),
            int(self.segment[i]),
        )

    @property
    def initial_pose(self) -> GroupPose:
        return GroupPose(float(self.x[0]), float(self.y[0]), float(self.theta[0]))

    @property
    def final_pose(self) -> GroupPose:
        return GroupPose(float(self.x[-1]), float(self.y[-1]), float(self.theta[-1]))

    def decimate(self, stride: int) -> "Trajectory":
        """Every stride-th sample, always keeping the last one."""
        if stride < 1:
            raise ValidationError("stride must be >= 1")
        idx = np.arange(0, len(self.t), stride)
        if idx[-1] != len(self.t) - 1:
            idx = np.append(idx, len(self.t) - 1)
        return Trajectory(*(col[idx] for col in self._columns()), warning=self.warning)

    def _columns(self):
        return (self.t, self.alpha1, self.alpha2, self.x, self.y, self.theta,
                self.xi_x, self.xi_y, self.xi_theta, self.segment)


VelocityModel = Callable[[float, float, float, float], tuple]


def swimmer_velocity_model(params: SwimmerParams) -> VelocityModel:
    validate_params(params)

    def model(a1, a2, u1, u2):
        return body_velocity_components(a1, a2, u1, u2, params)

    return model


def simulate(schedule: ControlSchedule, q0: Configuration, params: SwimmerParams,
             cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    return simulate_velocity_model(schedule, q0, swimmer_velocity_model(params), cfg)


def simulate_velocity_model(schedule: ControlSchedule, q0: Configuration,
                            model: VelocityModel,
                            cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Integrate a schedule under an arbitrary shape-to-body-velocity map."""
    if not (cfg.h > 0 and cfg.min_substeps >= 1):
        raise ValidationError("integrator needs h > 0 and min_substeps >= 1")

    segments = [(i, s) for i, s in enumerate(schedule.segments) if s.duration > 0.0]
    counts = [max(math.ceil(s.duration / cfg.h), cfg.min_substeps) for _, s in segments]
    total = sum(counts) + 1

    cols = {name: np.empty(total) for name in
            ("t", "alpha1", "alpha2", "x", "y", "theta", "xi_x", "xi_y", "xi_theta")}
    seg_col = np.empty(total, dtype=int)

    a1, a2 = q0.shape
    x, y, th = q0.pose
    now = 0.0
    row = 0

    def record(i, seg_idx, xi):
        cols["t"][i] = now
        cols["alpha1"][i] = wrap_angle(a1)
        cols["alpha2"][i] = wrap_angle(a2)
        cols["x"][i] = x
        cols["y"][i] = y
        cols["theta"][i] = wrap_angle(th)
        cols["xi_x"][i], cols["xi_y"][i], cols["xi_theta"][i] = xi
        seg_col[i] = seg_idx

    warning = ""
    if not segments:
        warning = "empty schedule: trajectory is the initial sample only"
        record(0, -1, (0.0, 0.0, 0.0))
        return Trajectory(**{k: v[:1] for k, v in cols.items()},
                          segment=seg_col[:1], warning=warning)

    for (seg_idx, seg), n_steps in zip(segments, counts):
        u1 = seg.amplitude if seg.channel == 1 else 0.0
        u2 = seg.amplitude if seg.channel == 2 else 0.0
        a1_0, a2_0, t_0 = a1, a2, now
        xi = model(a1, a2, u1, u2)
        if row == 0:
            record(0, seg_idx, xi)
            row = 1
        for k in range(n_steps):
            tau0 = seg.duration * (k / n_steps)
            tau1 = seg.duration * ((k + 1) / n_steps)
            hs = tau1 - tau0
            tm = tau0 + 0.5 * hs
            xim = model(a1_0 + u1 * tm, a2_0 + u2 * tm, u1, u2)
            a1 = a1_0 + u1 * tau1
            a2 = a2_0 + u2 * tau1
            xie = model(a1, a2, u1, u2)

            c, s = math.cos(th), math.sin(th)
            k1x = c * xi[0] - s * xi[1]
            k1y = s * xi[0] + c * xi[1]
            th2 = th + 0.5 * hs * xi[2]
            c, s = math.cos(th2), math.sin(th2)
            k2x = c * xim[0] - s * xim[1]
            k2y = s * xim[0] + c * xim[1]
            th3 = th + 0.5 * hs * xim[2]
            c, s = math.cos(th3), math.sin(th3)
            k3x = c * xim[0] - s * xim[1]
            k3y = s * xim[0] + c * xim[1]
            th4 = th + hs * xim[2]
            c, s = math.cos(th4), math.sin(th4)
            k4x = c * xie[0] - s * xie[1]
            k4y = s * xie[0] + c * xie[1]

            x += hs / 6.0 * (k1x + 2.0 * (k2x + k3x) + k4x)
            y += hs / 6.0 * (k1y + 2.0 * (k2y + k3y) + k4y)
            th += hs / 6.0 * (xi[2] + 4.0 * xim[2] + xie[2])

            now = t_0 + tau1
            xi = xie
            record(row, seg_idx, xi)
            row += 1

    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(th)):
        raise NumericalError("integration produced a non-finite pose")
    return Trajectory(**cols, segment=seg_col, warning=warning)


def net_displacement(traj: Trajectory) -> NetDisplacement:
    if len(traj) == 0:
        raise ValidationError("empty trajectory")
    delta = compose(inverse(traj.initial_pose), traj.final_pose)
    closure = torus_distance(
        (float(traj.alpha1[0]), float(traj.alpha2[0])),
        (float(traj.alpha1[-1]), float(traj.alpha2[-1])))
    return NetDisplacement(delta, closure)


@dataclass(frozen=True)
class ConvergenceReport:
    levels: tuple
    errors: tuple
    slope: float
    monotone: bool

    def rows(self):
        return list(zip(self.levels, self.errors))


def fit_loglog_slope(levels, errors) -> float:
    """Least-squares slope of log(error) against log(level)."""
    if len(levels) < 3:
        raise ValidationError("need at least 3 ladder points")
    lx = np.log(np.asarray(levels, dtype=float))
    ly = np.log(np.maximum(np.asarray(errors, dtype=float), 1e-300))
    coeffs = np.polyfit(lx, ly, 1)
    return float(coeffs[0])


def convergence_probe(family: Callable[[float], ControlSchedule], levels,
                      reference: np.ndarray, q0: Configuration,
                      model: VelocityModel,
                      cfg: IntegratorConfig = IntegratorConfig(),
                      scale: Callable[[float], float] = lambda e: e * e) -> ConvergenceReport:
    """Run a gait family over a ladder and compare to a scaled reference motion.

    The reference is a tangent 5-vector (or bare group triple); the error at
    level eps is the norm of the net displacement minus scale(eps) times the
    reference group part.
    """
    ref = np.asarray(reference, dtype=float)
    ref_group = ref[2:] if ref.shape == (5,) else ref
    errors = []
    for eps in levels:
        traj = simulate_velocity_model(family(eps), q0, model, cfg)
        delta = net_displacement(traj).delta
        achieved = np.array([delta.x, delta.y, delta.theta])
        errors.append(float(np.linalg.norm(achieved - scale(eps) * ref_group)))
    slope = fit_loglog_slope(levels, errors)
    ordered = sorted(range(len(levels)), key=lambda i: levels[i], reverse=True)
    monotone = all(errors[ordered[i]] >= errors[ordered[i + 1]]
                   for i in range(len(ordered) - 1))
    return ConvergenceReport(tuple(levels), tuple(errors), slope, monotone)
