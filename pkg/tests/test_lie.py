import math

import numpy as np
import pytest

from purcell.errors import NumericalError, ValidationError
from purcell.lie import (bracket_basis, bracket_field, controllability_report,
                         jacobian, lie_bracket, rank_report,
                         solve_bracket_coefficients)
from purcell.model import Configuration, ShapePoint, default_params, swimmer_fields
from purcell.se2 import GroupPose

PARAMS = default_params()
ORIGIN = Configuration(ShapePoint(0.0, 0.0), GroupPose(0.0, 0.0, 0.0))


def coords(q):
    return np.array([q.shape.alpha1, q.shape.alpha2, q.pose.x, q.pose.y, q.pose.theta])


def random_config(rng):
    return Configuration(ShapePoint(*rng.uniform(-1.5, 1.5, 2)),
                         GroupPose(*rng.uniform(-1, 1, 2), rng.uniform(-1.5, 1.5)))


def shape_poly_field(c):
    """Synthetic smooth field depending on shape only."""

    def field(q):
        a1, a2 = q.shape
        return np.array([math.sin(c * a1), math.cos(a2),
                         a1 * a2, math.sin(a1 + a2), a1 ** 2 - a2])

    return field


class TestJacobian:
    def test_constant_field(self):
        field = lambda q: np.array([1.0, -2.0, 0.5, 0.0, 3.0])
        J = jacobian(field, ORIGIN)
        assert np.array_equal(J, np.zeros((5, 5)))

    def test_linear_field_exact(self):
        rng = np.random.default_rng(5)
        M = rng.normal(size=(5, 5))
        field = lambda q: M @ coords(q)
        J = jacobian(field, random_config(rng))
        assert np.max(np.abs(J - M)) < 1e-9

    def test_swimmer_field_pose_columns_vanish(self):
        g1, _ = swimmer_fields(PARAMS)
        J = jacobian(g1, ORIGIN)
        assert np.array_equal(J[:, 2:], np.zeros((5, 3)))

    def test_rejects_bad_step(self):
        with pytest.raises(ValidationError):
            jacobian(lambda q: coords(q), ORIGIN, h=0.0)


class TestLieBracket:
    def test_self_bracket_vanishes(self):
        rng = np.random.default_rng(6)
        field = shape_poly_field(1.3)
        for _ in range(5):
            b = lie_bracket(field, field, random_config(rng))
            assert np.max(np.abs(b)) < 1e-9

    def test_antisymmetry(self):
        rng = np.random.default_rng(7)
        X = shape_poly_field(0.8)
        Y = shape_poly_field(-1.7)
        for _ in range(10):
            q = random_config(rng)
            fwd = lie_bracket(X, Y, q)
            rev = lie_bracket(Y, X, q)
            assert np.max(np.abs(fwd + rev)) < 1e-9

    def test_swimmer_bracket_shape_parts_vanish(self):
        g1, g2 = swimmer_fields(PARAMS)
        rng = np.random.default_rng(8)
        for _ in range(5):
            b = lie_bracket(g1, g2, random_config(rng))
            assert abs(b[0]) < 1e-8 and abs(b[1]) < 1e-8

    def test_known_bracket_on_coordinate_fields(self):
        # [d/da1, a1 * d/da2] = d/da2, with no group parts involved
        X = lambda q: np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        Y = lambda q: np.array([0.0, q.shape.alpha1, 0.0, 0.0, 0.0])
        b = lie_bracket(X, Y, ORIGIN)
        assert b == pytest.approx([0.0, 1.0, 0.0, 0.0, 0.0], abs=1e-10)

    def test_constant_group_fields_recover_algebra_commutator(self):
        # left-invariant fields bracket to the algebra commutator
        X = lambda q: np.array([0.0, 0.0, 1.0, 0.0, 0.5])
        Y = lambda q: np.array([0.0, 0.0, 0.0, 1.0, 0.0])
        b = lie_bracket(X, Y, ORIGIN)
        # [ (1,0,.5), (0,1,0) ] = (-0.5*1, 0.5*0... ) = (-0.5, 0, 0) flipped signs per formula
        assert b[2:] == pytest.approx((-0.5, 0.0, 0.0), abs=1e-12)

    def test_richardson_order(self):
        g1, g2 = swimmer_fields(PARAMS)
        rng = np.random.default_rng(9)
        for _ in range(5):
            q = random_config(rng)
            vals = [lie_bracket(g1, g2, q, h=h) for h in (2e-3, 1e-3, 5e-4)]
            d1 = np.linalg.norm(vals[0] - vals[1])
            d2 = np.linalg.norm(vals[1] - vals[2])
            order = math.log2(d1 / d2)
            assert order >= 1.9

    def test_pose_invariance(self):
        g1, g2 = swimmer_fields(PARAMS)
        shape = ShapePoint(0.6, -0.9)
        qa = Configuration(shape, GroupPose(0.0, 0.0, 0.0))
        qb = Configuration(shape, GroupPose(1.0, -2.0, 2.0))
        assert np.max(np.abs(lie_bracket(g1, g2, qa) - lie_bracket(g1, g2, qb))) < 1e-8

    def test_nested_bracket_field(self):
        g1, g2 = swimmer_fields(PARAMS)
        z = bracket_field(g1, g2, h=1e-3)
        nested = lie_bracket(g1, z, ORIGIN, h=1e-2)
        assert abs(nested[0]) < 1e-10 and abs(nested[1]) < 1e-10
        assert abs(nested[2]) < 1e-6          # x response is symmetry-forbidden
        assert abs(nested[3]) > 1e-4 or abs(nested[4]) > 1e-4


class TestControllability:
    def test_rank_five_at_straight_shape(self):
        rep = controllability_report(ORIGIN, PARAMS, tol=1e-8)
        assert rep.rank == 5
        assert np.all(np.diff(rep.singular_values) <= 1e-15)

    def test_rank_five_at_random_configurations(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            rep = controllability_report(random_config(rng), PARAMS)
            assert rep.rank == 5

    def test_duplicated_columns_drop_rank(self):
        basis = bracket_basis(ORIGIN, PARAMS)
        degenerate = basis.copy()
        degenerate[:, 3] = degenerate[:, 2]
        degenerate[:, 4] = degenerate[:, 1]
        rep = rank_report(ORIGIN, degenerate, tol=1e-8)
        assert rep.rank <= 4

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValidationError):
            controllability_report(ORIGIN, PARAMS, tol=0.0)


class TestCoefficients:
    def test_x_pattern(self):
        c = solve_bracket_coefficients("x", ORIGIN, PARAMS)
        assert abs(c.alpha) > 0
        assert abs(c.beta) <= 1e-6 * abs(c.alpha)
        assert abs(c.gamma) <= 1e-6 * abs(c.alpha)

    def test_y_pattern(self):
        c = solve_bracket_coefficients("y", ORIGIN, PARAMS)
        assert abs(c.alpha) <= 1e-6 * abs(c.beta)
        assert abs(c.beta + c.gamma) <= 1e-6 * abs(c.beta)

    def test_theta_pattern(self):
        c = solve_bracket_coefficients("theta", ORIGIN, PARAMS)
        assert abs(c.alpha) <= 1e-6 * abs(c.beta)
        assert abs(c.beta - c.gamma) <= 1e-6 * abs(c.beta)

    def test_solution_solves_the_system(self):
        basis = bracket_basis(ORIGIN, PARAMS)
        B = basis[2:, 2:]
        for i, d in enumerate(("x", "y", "theta")):
            c = solve_bracket_coefficients(d, ORIGIN, PARAMS)
            rhs = np.zeros(3)
            rhs[i] = 1.0
            assert np.max(np.abs(B @ np.array(c) - rhs)) < 1e-10

    def test_scaling_linearity(self):
        basis = bracket_basis(ORIGIN, PARAMS)
        B = basis[2:, 2:]
        c = np.array(solve_bracket_coefficients("y", ORIGIN, PARAMS))
        for scale in (2.0, -0.3, 17.5):
            scaled = np.linalg.solve(B, scale * np.eye(3)[:, 1])
            assert np.max(np.abs(scaled - scale * c)) < 1e-10 * max(1.0, abs(scale) * np.max(np.abs(c)))

    def test_rejects_unknown_direction(self):
        with pytest.raises(ValidationError):
            solve_bracket_coefficients("z", ORIGIN, PARAMS)

    def test_signals_degenerate_basis(self, monkeypatch):
        # real parameter sets keep the bracket span full, so force a
        # degenerate basis to exercise the guard
        import purcell.lie as lie_mod
        basis = bracket_basis(ORIGIN, PARAMS)
        degenerate = basis.copy()
        degenerate[:, 4] = degenerate[:, 3]
        monkeypatch.setattr(lie_mod, "bracket_basis",
                            lambda *a, **k: degenerate)
        with pytest.raises(NumericalError, match="span"):
            lie_mod.solve_bracket_coefficients("x", ORIGIN, PARAMS)
