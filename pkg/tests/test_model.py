import math

import numpy as np
import pytest

from purcell.errors import ValidationError
from purcell.model import (Configuration, ShapePoint, ShapeVelocity, SwimmerParams,
                           body_velocity, cfd_drag_coefficients, connection,
                           control_field, default_params, derive_drag_coefficients,
                           drag_matrices, link_frames, swimmer_fields)
from purcell.oracle import reference_body_velocity
from purcell.se2 import GroupPose

PARAMS = default_params()
ORIGIN_POSE = GroupPose(0.0, 0.0, 0.0)


def random_shape(rng):
    return ShapePoint(*rng.uniform(-math.pi, math.pi, 2))


class TestDragCoefficients:
    def test_slender_body_values(self):
        p = derive_drag_coefficients(SwimmerParams(L=0.05, b=0.005, mu=0.950))
        assert p.k_long == pytest.approx(2 * math.pi * 0.950 / math.log(20.0), rel=1e-12)
        assert p.k_long == pytest.approx(1.9926, abs=2e-4)
        assert p.k_lat == pytest.approx(3.9852, abs=4e-4)

    def test_ratio_is_two(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            L = rng.uniform(0.01, 0.2)
            p = derive_drag_coefficients(
                SwimmerParams(L=L, b=L * rng.uniform(0.01, 0.5), mu=rng.uniform(0.1, 5)))
            assert p.k_lat / p.k_long == pytest.approx(2.0, rel=1e-14)

    def test_rejects_thick_links(self):
        with pytest.raises(ValidationError):
            derive_drag_coefficients(SwimmerParams(L=0.05, b=0.05, mu=1.0))
        with pytest.raises(ValidationError):
            derive_drag_coefficients(SwimmerParams(L=0.05, b=0.06, mu=1.0))

    def test_cfd_provenance(self):
        p = cfd_drag_coefficients(SwimmerParams(), flow_speed=0.01)
        assert p.k_lat == pytest.approx(0.005922 / (0.01 * 0.1), rel=1e-12)
        assert p.k_long == pytest.approx(0.0001013 / (0.01 * 0.1), rel=1e-12)
        assert p.k_lat > p.k_long > 0
        with pytest.raises(ValidationError):
            cfd_drag_coefficients(SwimmerParams(), flow_speed=0.0)


class TestLinkFrames:
    def test_straight_collinear(self):
        left, base, right = link_frames(ShapePoint(0.0, 0.0), PARAMS)
        L = PARAMS.L
        assert left == pytest.approx((-2 * L, 0.0, 0.0))
        assert base == pytest.approx((0.0, 0.0, 0.0))
        assert right == pytest.approx((2 * L, 0.0, 0.0))

    def test_left_quarter_turn(self):
        left, _, _ = link_frames(ShapePoint(math.pi / 2, 0.0), PARAMS)
        L = PARAMS.L
        assert left.x == pytest.approx(-L)
        assert left.y == pytest.approx(-L)
        assert left.theta == pytest.approx(math.pi / 2)

    def test_mirror_reflection(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = rng.uniform(-2.5, 2.5)
            fwd = link_frames(ShapePoint(a, a), PARAMS)
            rev = link_frames(ShapePoint(-a, -a), PARAMS)
            for f, r in zip(fwd, rev):
                assert r.x == pytest.approx(f.x, abs=1e-14)
                assert r.y == pytest.approx(-f.y, abs=1e-14)
                assert r.theta == pytest.approx(-f.theta, abs=1e-14)


class TestDragMatrices:
    def test_symmetric_negative_definite_on_grid(self):
        angles = -math.pi + 2 * math.pi * np.arange(24) / 24
        for a1 in angles:
            for a2 in angles:
                w1 = drag_matrices(ShapePoint(float(a1), float(a2)), PARAMS).omega1
                assert np.max(np.abs(w1 - w1.T)) < 1e-10
                assert np.max(np.linalg.eigvalsh(w1)) < 0.0

    def test_straight_shape_decoupling(self):
        w1 = drag_matrices(ShapePoint(0.0, 0.0), PARAMS).omega1
        assert abs(w1[0, 1]) < 1e-15
        assert abs(w1[0, 2]) < 1e-15

    def test_linear_in_drag_coefficients(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            shape = random_shape(rng)
            c = rng.uniform(0.1, 10.0)
            scaled = PARAMS._replace(k_long=c * PARAMS.k_long, k_lat=c * PARAMS.k_lat)
            m1 = drag_matrices(shape, PARAMS)
            m2 = drag_matrices(shape, scaled)
            assert np.allclose(m2.omega1, c * m1.omega1, rtol=1e-13)
            assert np.allclose(m2.omega2, c * m1.omega2, rtol=1e-13)
            a1 = connection(shape, PARAMS).A
            a2 = connection(shape, scaled).A
            assert np.max(np.abs(a1 - a2)) < 1e-12


class TestConnection:
    def test_residual_on_grid(self):
        angles = np.linspace(-math.pi, math.pi, 9)
        for a1 in angles:
            for a2 in angles:
                shape = ShapePoint(float(a1), float(a2))
                mats = drag_matrices(shape, PARAMS)
                A = connection(shape, PARAMS).A
                residual = np.linalg.norm(mats.omega1 @ A - mats.omega2)
                assert residual < 1e-10

    def test_straight_shape_structure(self):
        # no x response to either paddle; equal y response; opposite turning
        A = connection(ShapePoint(0.0, 0.0), PARAMS).A
        assert abs(A[0, 0]) < 1e-14 and abs(A[0, 1]) < 1e-14
        assert A[1, 0] == pytest.approx(A[1, 1], rel=1e-10)
        assert A[2, 0] == pytest.approx(-A[2, 1], rel=1e-10)
        assert abs(A[2, 0]) > 0

    def test_end_swap_symmetry(self):
        # relabeling the swimmer end to end: A(-a2, -a1) = diag(1,1,-1) A(a1,a2) P
        rng = np.random.default_rng(3)
        flip = np.diag([1.0, 1.0, -1.0])
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        for _ in range(25):
            a1, a2 = rng.uniform(-math.pi, math.pi, 2)
            lhs = connection(ShapePoint(-a2, -a1), PARAMS).A
            rhs = flip @ connection(ShapePoint(a1, a2), PARAMS).A @ swap
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_mirror_symmetry(self):
        # reflecting across the base link: A(-a1, -a2) = -diag(1,-1,-1) A(a1,a2)
        rng = np.random.default_rng(4)
        flip = np.diag([1.0, -1.0, -1.0])
        for _ in range(25):
            a1, a2 = rng.uniform(-math.pi, math.pi, 2)
            lhs = connection(ShapePoint(-a1, -a2), PARAMS).A
            rhs = -flip @ connection(ShapePoint(a1, a2), PARAMS).A
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_matches_oracle_at_straight_shape(self):
        A = connection(ShapePoint(0.0, 0.0), PARAMS).A
        for sdot in (ShapeVelocity(1.0, 0.0), ShapeVelocity(0.0, 1.0)):
            ref = reference_body_velocity(ShapePoint(0.0, 0.0), sdot, PARAMS)
            mine = -A @ np.array(sdot)
            assert np.max(np.abs(mine - ref)) < 1e-8


class TestBodyVelocity:
    def test_zero_rates(self):
        xi = body_velocity(ShapePoint(0.4, 1.0), ShapeVelocity(0.0, 0.0), PARAMS)
        assert xi == pytest.approx((0.0, 0.0, 0.0))

    def test_parallel_arm_shape_kills_rotation(self):
        # at shape (a, -a) the outer links are parallel; equal joint rates
        # are frame-flip symmetric, so the turning rate vanishes exactly
        for a in (0.3, 0.9, -1.2):
            xi = body_velocity(ShapePoint(a, -a), ShapeVelocity(1.0, 1.0), PARAMS)
            assert abs(xi.xi_theta) < 1e-10

    def test_breaststroke_is_pure_y(self):
        # at shape (a, a) the swimmer is mirror symmetric about the base
        # y-axis; the synchronized stroke produces sideways motion only
        for a in (0.0, 0.5, -1.0):
            xi = body_velocity(ShapePoint(a, a), ShapeVelocity(1.0, 1.0), PARAMS)
            assert abs(xi.xi_x) < 1e-10
            assert abs(xi.xi_theta) < 1e-10
            assert abs(xi.xi_y) > 0

    def test_matches_oracle(self):
        xi = body_velocity(ShapePoint(0.3, -0.2), ShapeVelocity(1.0, 0.5), PARAMS)
        ref = reference_body_velocity(ShapePoint(0.3, -0.2),
                                      ShapeVelocity(1.0, 0.5), PARAMS)
        assert np.max(np.abs(np.array(xi) - ref)) < 1e-8


class TestControlField:
    def test_shape_components(self):
        q = Configuration(ShapePoint(0.2, -0.4), ORIGIN_POSE)
        g1 = control_field(1, q, PARAMS)
        g2 = control_field(2, q, PARAMS)
        assert g1[:2] == pytest.approx((1.0, 0.0))
        assert g2[:2] == pytest.approx((0.0, 1.0))

    def test_pose_independent(self):
        shape = ShapePoint(0.9, 0.1)
        qa = Configuration(shape, ORIGIN_POSE)
        qb = Configuration(shape, GroupPose(2.0, -1.0, 2.2))
        assert np.array_equal(control_field(1, qa, PARAMS),
                              control_field(1, qb, PARAMS))

    def test_group_part_is_minus_connection_column(self):
        shape = ShapePoint(0.0, 0.0)
        q = Configuration(shape, ORIGIN_POSE)
        A = connection(shape, PARAMS).A
        g1 = control_field(1, q, PARAMS)
        assert np.allclose(g1[2:], -A[:, 0], atol=1e-12)

    def test_rejects_bad_channel(self):
        q = Configuration(ShapePoint(0.0, 0.0), ORIGIN_POSE)
        with pytest.raises(ValidationError):
            control_field(3, q, PARAMS)

    def test_finite_and_bounded_away_from_zero_on_grid(self):
        g1, g2 = swimmer_fields(PARAMS)
        angles = -math.pi + 2 * math.pi * np.arange(24) / 24
        for a1 in angles:
            for a2 in angles:
                q = Configuration(ShapePoint(float(a1), float(a2)), ORIGIN_POSE)
                for field in (g1, g2):
                    v = field(q)
                    assert np.all(np.isfinite(v))
                    assert np.linalg.norm(v) >= 1.0  # unit shape component


def test_params_validation():
    with pytest.raises(ValidationError):
        body_velocity(ShapePoint(0, 0), ShapeVelocity(1, 0), SwimmerParams())
    bad = default_params()._replace(k_long=5.0, k_lat=4.0)
    with pytest.raises(ValidationError):
        body_velocity(ShapePoint(0, 0), ShapeVelocity(1, 0), bad)
