"""Resistive-force model of the 3-link planar swimmer.

Each link is a slender rod of length 2L and radius b.  Drag per unit length
is -k_long * v_long along the rod and -k_lat * v_lat across it.  Summing and
balancing the total wrench (force plus torque about the base-link midpoint)
for a massless swimmer gives a purely kinematic law

    xi = -A(alpha1, alpha2) * (alpha1_dot, alpha2_dot)

where A is the 3x2 local connection and xi the base-link body velocity.

Frame convention (fixed; every symmetry statement in the tests depends on it):
the base frame sits at the middle link's midpoint with x along the link.
Joints are at (-L, 0) and (+L, 0).  The left link's frame is rotated by
+alpha1 from the base x-axis and its midpoint sits L behind the joint along
that direction; the right link mirrors this with frame angle -alpha2 and its
midpoint L ahead of its joint.  At alpha1 = alpha2 the two outer links are
mirror images across the base y-axis.
"""

import math
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError
from .se2 import BodyVelocity, GroupPose, wrap_angle

# 3-point Gauss-Legendre on [-1, 1]: exact for the quadratic drag integrands.
_GL_NODES = (-math.sqrt(0.6), 0.0, math.sqrt(0.6))
_GL_WEIGHTS = (5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0)

# Drag-matrix conditioning beyond this is treated as a model pathology.
COND_LIMIT = 1e12

# Reference force readings from a CFD calibration of one link (normal and
# tangential drag at an unreported flow speed); kept as an alternative
# provenance for the per-unit-length coefficients.
CFD_NORMAL_FORCE = 0.005922
CFD_TANGENTIAL_FORCE = 0.0001013


class SwimmerParams(NamedTuple):
    """Geometry, fluid, and drag coefficients. k fields may start unset (None)."""

    L: float = 0.05          # link half-length (m)
    b: float = 0.005         # link radius (m)
    mu: float = 0.950        # fluid viscosity (Pa s)
    k_long: float = None     # longitudinal drag per unit length (N s/m^2)
    k_lat: float = None      # lateral drag per unit length (N s/m^2)


class ShapePoint(NamedTuple):
    alpha1: float
    alpha2: float


class ShapeVelocity(NamedTuple):
    alpha1_dot: float
    alpha2_dot: float


class Configuration(NamedTuple):
    shape: ShapePoint
    pose: GroupPose


class DragMatrices(NamedTuple):
    omega1: np.ndarray  # 3x3, wrench per unit body velocity
    omega2: np.ndarray  # 3x2, wrench per unit joint rate


class ConnectionForm(NamedTuple):
    A: np.ndarray  # 3x2; columns are the body-velocity response to each joint


def validate_params(params: SwimmerParams, need_k: bool = True) -> None:
    if not (params.L > 0 and params.b > 0 and params.mu > 0):
        raise ValidationError("L, b, mu must all be positive")
    if params.b >= params.L:
        raise ValidationError(
            f"slenderness violated: need b < L, got b={params.b}, L={params.L}")
    if need_k:
        if params.k_long is None or params.k_lat is None:
            raise ValidationError("drag coefficients unset; derive or supply them")
        if not (params.k_lat > params.k_long > 0):
            raise ValidationError("need k_lat > k_long > 0")


def derive_drag_coefficients(params: SwimmerParams) -> SwimmerParams:
    """Fill k_long, k_lat from the slender-body formulas.

    Total drag on a rod of length l = 2L moving uniformly is
    2*pi*mu*l*v / ln(l/b) longitudinally and twice that laterally; dividing by
    the length gives constant per-unit-length coefficients, so
    k_lat / k_long == 2 exactly.
    """
    validate_params(params, need_k=False)
    log_slenderness = math.log(2.0 * params.L / params.b)
    if log_slenderness <= 0.0:
        raise ValidationError("2L/b must exceed 1 for the slender-body drag law")
    k_long = 2.0 * math.pi * params.mu / log_slenderness
    return params._replace(k_long=k_long, k_lat=2.0 * k_long)


def cfd_drag_coefficients(params: SwimmerParams, flow_speed: float) -> SwimmerParams:
    """Fill k_long, k_lat from the CFD force readings instead.

    The readings are total forces on one link at `flow_speed`, so
    k = F / (v * 2L).  The calibration speed is not part of the readings and
    must be supplied by the caller.
    """
    validate_params(params, need_k=False)
    if not flow_speed > 0:
        raise ValidationError("CFD coefficient provenance requires a positive flow speed")
    span = 2.0 * params.L
    k_long = CFD_TANGENTIAL_FORCE / (flow_speed * span)
    k_lat = CFD_NORMAL_FORCE / (flow_speed * span)
    return params._replace(k_long=k_long, k_lat=k_lat)


def default_params() -> SwimmerParams:
    return derive_drag_coefficients(SwimmerParams())


def link_frames(shape: ShapePoint, params: SwimmerParams) -> tuple[GroupPose, GroupPose, GroupPose]:
    """Frames (left, base, right) of the three links in base-link coordinates.

    Each frame sits at its link's midpoint with x along the link.
    """
    a1, a2 = shape
    L = params.L
    left = GroupPose(-L - L * math.cos(a1), -L * math.sin(a1), wrap_angle(a1))
    base = GroupPose(0.0, 0.0, 0.0)
    right = GroupPose(L + L * math.cos(a2), -L * math.sin(a2), wrap_angle(-a2))
    return left, base, right


def _link_data(a1: float, a2: float, L: float):
    """Per-link quantities for the wrench assembly.

    Yields (anchor_x, anchor_y, offset, cos, sin, spin) where a rod point at
    arclength rho in [-L, L] sits at anchor + R(phi) * (rho + offset, 0) and
    the link's extra angular rate is spin times the matching joint rate.
    """
    c1, s1 = math.cos(a1), math.sin(a1)
    c2, s2 = math.cos(a2), math.sin(a2)
    return (
        (-L, 0.0, -L, c1, s1, 1.0),    # left link, joint rate alpha1_dot
        (0.0, 0.0, 0.0, 1.0, 0.0, 0.0),  # base link
        (L, 0.0, L, c2, -s2, -1.0),    # right link, joint rate alpha2_dot
    )


def _assemble_wrench(a1: float, a2: float, params: SwimmerParams):
    """Scalar assembly of the drag wrench maps.

    Returns (w1, w2) as nested tuples: w1[i][j] is the i-th wrench component
    per unit body velocity j, w2[i][j] per unit joint rate j.  Integrands are
    quadratic in arclength, so the 3-point rule is exact.
    """
    L = params.L
    kl = params.k_long
    kn = params.k_lat

    w1_00 = w1_01 = w1_02 = w1_11 = w1_12 = w1_22 = 0.0
    w2 = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]

    for ax, ay, off, c, s, spin in _link_data(a1, a2, L):
        m11 = kl * c * c + kn * s * s
        m12 = (kl - kn) * c * s
        m22 = kl * s * s + kn * c * c
        jch = 0 if spin > 0 else 1  # joint channel for the moving links
        for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
            w = weight * L
            rho = node * L + off
            rx = c * rho
            ry = s * rho
            px = ax + rx
            py = ay + ry
            # column of the point velocity per unit xi_theta
            u1 = -py * m11 + px * m12
            u2 = -py * m12 + px * m22
            w1_00 -= w * m11
            w1_01 -= w * m12
            w1_02 -= w * u1
            w1_11 -= w * m22
            w1_12 -= w * u2
            w1_22 -= w * (-py * u1 + px * u2)
            if spin != 0.0:
                cx = -spin * ry
                cy = spin * rx
                f1 = m11 * cx + m12 * cy
                f2 = m12 * cx + m22 * cy
                w2[0][jch] -= w * f1
                w2[1][jch] -= w * f2
                w2[2][jch] -= w * (-py * f1 + px * f2)

    w1 = ((w1_00, w1_01, w1_02), (w1_01, w1_11, w1_12), (w1_02, w1_12, w1_22))
    return w1, (tuple(w2[0]), tuple(w2[1]), tuple(w2[2]))


def _solve3(m, rhs):
    """Solve the 3x3 system m x = rhs by Gaussian elimination with partial pivoting."""
    a = [list(m[0]), list(m[1]), list(m[2])]
    x = list(rhs)
    for col in range(3):
        piv = max(range(col, 3), key=lambda r: abs(a[r][col]))
        if abs(a[piv][col]) < 1e-300:
            raise NumericalError("singular drag matrix")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            x[col], x[piv] = x[piv], x[col]
        inv = 1.0 / a[col][col]
        for r in range(col + 1, 3):
            f = a[r][col] * inv
            if f != 0.0:
                for k in range(col, 3):
                    a[r][k] -= f * a[col][k]
                x[r] -= f * x[col]
    out = [0.0, 0.0, 0.0]
    for r in (2, 1, 0):
        acc = x[r]
        for k in range(r + 1, 3):
            acc -= a[r][k] * out[k]
        out[r] = acc / a[r][r]
    return out


def _connection_columns(a1: float, a2: float, params: SwimmerParams):
    """Columns (A1, A2) of the local connection at a shape, as float triples."""
    w1, w2 = _assemble_wrench(a1, a2, params)
    col1 = _solve3(w1, (w2[0][0], w2[1][0], w2[2][0]))
    col2 = _solve3(w1, (w2[0][1], w2[1][1], w2[2][1]))
    return col1, col2


def body_velocity_components(a1, a2, u1, u2, params) -> tuple[float, float, float]:
    """Fast path: body velocity (xi_x, xi_y, xi_theta) for joint rates (u1, u2)."""
    w1, w2 = _assemble_wrench(a1, a2, params)
    rhs = (
        w2[0][0] * u1 + w2[0][1] * u2,
        w2[1][0] * u1 + w2[1][1] * u2,
        w2[2][0] * u1 + w2[2][1] * u2,
    )
    sol = _solve3(w1, rhs)
    return (-sol[0], -sol[1], -sol[2])


def drag_matrices(shape: ShapePoint, params: SwimmerParams) -> DragMatrices:
    validate_params(params)
    w1, w2 = _assemble_wrench(shape[0], shape[1], params)
    return DragMatrices(np.array(w1, dtype=float), np.array(w2, dtype=float))


def connection(shape: ShapePoint, params: SwimmerParams) -> ConnectionForm:
    """Local connection A = omega1^-1 omega2, via a direct solve."""
    validate_params(params)
    mats = drag_matrices(shape, params)
    cond = np.linalg.cond(mats.omega1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(
            f"drag matrix ill-conditioned at shape {tuple(shape)}: cond={cond:.3e}")
    A = np.linalg.solve(mats.omega1, mats.omega2)
    return ConnectionForm(A)


def body_velocity(shape: ShapePoint, sdot: ShapeVelocity, params: SwimmerParams) -> BodyVelocity:
    """xi = -A(shape) * sdot."""
    validate_params(params)
    xi = body_velocity_components(shape[0], shape[1], sdot[0], sdot[1], params)
    return BodyVelocity(*xi)


def control_field(channel: int, q: Configuration, params: SwimmerParams) -> np.ndarray:
    """Control vector field of one joint as a 5-vector.

    The first two entries are the joint-rate basis vector for `channel`, the
    last three the body velocity -A_channel(shape).  Depends on shape only.
    """
    if channel not in (1, 2):
        raise ValidationError(f"channel must be 1 or 2, got {channel}")
    a1, a2 = q.shape
    u1, u2 = (1.0, 0.0) if channel == 1 else (0.0, 1.0)
    xi = body_velocity_components(a1, a2, u1, u2, params)
    return np.array([u1, u2, xi[0], xi[1], xi[2]])


def swimmer_fields(params: SwimmerParams):
    """The two control vector fields as plain callables on Configuration."""
    validate_params(params)

    def g1(q: Configuration) -> np.ndarray:
        return control_field(1, q, params)

    def g2(q: Configuration) -> np.ndarray:
        return control_field(2, q, params)

    return g1, g2
