"""Planar rigid-body group operations.

Poses are (x, y, theta) triples with theta kept in (-pi, pi]; body velocities
are (xi_x, xi_y, xi_theta) expressed in the moving frame.  Everything here is
a pure function of immutable values.
"""

import math
from typing import NamedTuple

TWO_PI = 2.0 * math.pi

# Below this |theta*t| the closed-form arc is replaced by a 2nd-order series
# to avoid cancellation in sin(wt)/w and (1-cos(wt))/w.
SERIES_THRESHOLD = 1e-6


class GroupPose(NamedTuple):
    x: float
    y: float
    theta: float


class BodyVelocity(NamedTuple):
    xi_x: float
    xi_y: float
    xi_theta: float


IDENTITY = GroupPose(0.0, 0.0, 0.0)


def wrap_angle(a: float) -> float:
    """Normalize an angle into (-pi, pi]; exact no-op when already inside."""
    if -math.pi < a <= math.pi:
        return a
    r = math.fmod(a + math.pi, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r - math.pi


def compose(a: GroupPose, b: GroupPose) -> GroupPose:
    """Pose of frame b expressed through frame a (the SE(2) product a*b)."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    return GroupPose(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        wrap_angle(a.theta + b.theta),
    )


def inverse(g: GroupPose) -> GroupPose:
    c, s = math.cos(g.theta), math.sin(g.theta)
    return GroupPose(
        -(c * g.x + s * g.y),
        -(-s * g.x + c * g.y),
        wrap_angle(-g.theta),
    )


def exp_twist(xi: BodyVelocity, t: float) -> GroupPose:
    """Pose reached from the identity by holding body velocity xi for time t.

    Pure translation when xi_theta == 0, otherwise the circular-arc formula
    with a series fallback near xi_theta*t == 0.
    """
    vx, vy, w = xi
    ang = w * t
    if abs(ang) < SERIES_THRESHOLD:
        # sin(ang)/w ~ t(1 - ang^2/6), (1-cos(ang))/w ~ (t*ang/2)(1 - ang^2/12)
        a = t * (1.0 - ang * ang / 6.0)
        b = 0.5 * t * ang * (1.0 - ang * ang / 12.0)
    else:
        a = math.sin(ang) / w
        b = (1.0 - math.cos(ang)) / w
    return GroupPose(a * vx - b * vy, b * vx + a * vy, wrap_angle(ang))


def world_rate(g: GroupPose, xi: BodyVelocity) -> tuple[float, float, float]:
    """Coordinate rates (xdot, ydot, thetadot) of a pose moving with body velocity xi."""
    c, s = math.cos(g.theta), math.sin(g.theta)
    return (c * xi.xi_x - s * xi.xi_y, s * xi.xi_x + c * xi.xi_y, xi.xi_theta)


def se2_commutator(a, b) -> tuple[float, float, float]:
    """Algebra commutator [a, b] of two body-velocity triples."""
    ax, ay, aw = a
    bx, by, bw = b
    return (-aw * by + bw * ay, aw * bx - bw * ax, 0.0)


def torus_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Euclidean distance between two points on the 2-torus of joint angles."""
    d1 = wrap_angle(a[0] - b[0])
    d2 = wrap_angle(a[1] - b[1])
    return math.hypot(d1, d2)
