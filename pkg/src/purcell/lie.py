"""Numerical Lie-algebra tools for vector fields on the swimmer's configuration space.

A vector field is any callable Configuration -> 5-vector whose entries are
(joint rates, body velocity).  Because the group slots hold body-frame
components, the honest Lie bracket is the finite-difference part
DY.X - DX.Y plus the se(2) commutator of the two group parts; without that
term the square-gait limit tests come out one order too low.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError
from .model import Configuration, ShapePoint, SwimmerParams, swimmer_fields
from .se2 import GroupPose, se2_commutator, wrap_angle

VectorFieldHandle = Callable[[Configuration], np.ndarray]

DEFAULT_STEP = 1e-5
# Steps for nested brackets: the outer difference divides by its step twice,
# so it needs to sit well above the inner evaluation's noise floor.
INNER_STEP = 1e-3
OUTER_STEP = 1e-2

DEFAULT_RANK_TOL = 1e-8


class BracketCoefficients(NamedTuple):
    alpha: float
    beta: float
    gamma: float


@dataclass(frozen=True)
class ControllabilityReport:
    point: Configuration
    basis: np.ndarray            # 5x5, columns g1, g2, [g1,g2], [g1,[g1,g2]], [g2,[g1,g2]]
    singular_values: np.ndarray  # nonincreasing
    rank: int
    tol: float


def _perturbed(q: Configuration, coord: int, delta: float) -> Configuration:
    a1, a2 = q.shape
    x, y, th = q.pose
    if coord == 0:
        return Configuration(ShapePoint(wrap_angle(a1 + delta), a2), q.pose)
    if coord == 1:
        return Configuration(ShapePoint(a1, wrap_angle(a2 + delta)), q.pose)
    if coord == 2:
        return Configuration(q.shape, GroupPose(x + delta, y, th))
    if coord == 3:
        return Configuration(q.shape, GroupPose(x, y + delta, th))
    return Configuration(q.shape, GroupPose(x, y, wrap_angle(th + delta)))


def jacobian(X: VectorFieldHandle, q: Configuration, h: float = DEFAULT_STEP) -> np.ndarray:
    """Central-difference Jacobian of a field, column per coordinate.

    Shape coordinates are perturbed on the torus.
    """
    if not h > 0:
        raise ValidationError("finite-difference step must be positive")
    cols = []
    for j in range(5):
        plus = np.asarray(X(_perturbed(q, j, h)), dtype=float)
        minus = np.asarray(X(_perturbed(q, j, -h)), dtype=float)
        cols.append((plus - minus) / (2.0 * h))
    return np.column_stack(cols)


def lie_bracket(X: VectorFieldHandle, Y: VectorFieldHandle, q: Configuration,
                h: float = DEFAULT_STEP) -> np.ndarray:
    """[X, Y] at q, in the same (joint rates, body velocity) components."""
    x_val = np.asarray(X(q), dtype=float)
    y_val = np.asarray(Y(q), dtype=float)
    out = jacobian(Y, q, h) @ x_val - jacobian(X, q, h) @ y_val
    out[2:] += se2_commutator(tuple(x_val[2:]), tuple(y_val[2:]))
    return out


def bracket_field(X: VectorFieldHandle, Y: VectorFieldHandle,
                  h: float = DEFAULT_STEP) -> VectorFieldHandle:
    """[X, Y] as a new field, recomputed pointwise (no caching)."""

    def field(q: Configuration) -> np.ndarray:
        return lie_bracket(X, Y, q, h)

    return field


def bracket_basis(p: Configuration, params: SwimmerParams,
                  h_inner: float = INNER_STEP, h_outer: float = OUTER_STEP) -> np.ndarray:
    """Columns g1, g2, [g1,g2], [g1,[g1,g2]], [g2,[g1,g2]] evaluated at p."""
    g1, g2 = swimmer_fields(params)
    z = bracket_field(g1, g2, h_inner)
    cols = [
        g1(p),
        g2(p),
        lie_bracket(g1, g2, p, h_inner),
        lie_bracket(g1, z, p, h_outer),
        lie_bracket(g2, z, p, h_outer),
    ]
    return np.column_stack(cols)


def controllability_report(p: Configuration, params: SwimmerParams,
                           tol: float = DEFAULT_RANK_TOL,
                           h_inner: float = INNER_STEP,
                           h_outer: float = OUTER_STEP) -> ControllabilityReport:
    """Rank of the bracket-generated distribution at p.

    rank counts singular values above tol * sigma_max.
    """
    if not tol > 0:
        raise ValidationError("rank tolerance must be positive")
    basis = bracket_basis(p, params, h_inner, h_outer)
    return rank_report(p, basis, tol)


def rank_report(p: Configuration, basis: np.ndarray, tol: float) -> ControllabilityReport:
    sigma = np.linalg.svd(basis, compute_uv=False)
    rank = int(np.sum(sigma > tol * sigma[0])) if sigma[0] > 0 else 0
    return ControllabilityReport(point=p, basis=basis, singular_values=sigma,
                                 rank=rank, tol=tol)


def solve_bracket_coefficients(direction: str, p: Configuration, params: SwimmerParams,
                               h_inner: float = INNER_STEP,
                               h_outer: float = OUTER_STEP) -> BracketCoefficients:
    """Weights (alpha, beta, gamma) on ([g1,g2], [g1,[g1,g2]], [g2,[g1,g2]])
    whose group parts combine to the unit x, y or theta body direction at p.
    """
    try:
        index = {"x": 0, "y": 1, "theta": 2}[direction]
    except KeyError:
        raise ValidationError(f"direction must be x, y or theta, got {direction!r}")
    basis = bracket_basis(p, params, h_inner, h_outer)
    brackets = basis[:, 2:]
    shape_leak = np.max(np.abs(brackets[:2, :]))
    if shape_leak > 1e-8:
        raise NumericalError(
            f"bracket fields leak into shape rates ({shape_leak:.3e}); model is inconsistent")
    B = brackets[2:, :]
    sigma = np.linalg.svd(B, compute_uv=False)
    if sigma[0] == 0 or sigma[-1] < 1e-10 * sigma[0]:
        raise NumericalError(
            f"bracket group parts fail to span the group directions at shape {tuple(p.shape)}")
    rhs = np.zeros(3)
    rhs[index] = 1.0
    sol = np.linalg.solve(B, rhs)
    return BracketCoefficients(float(sol[0]), float(sol[1]), float(sol[2]))
