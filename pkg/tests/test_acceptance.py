"""Acceptance suite: one test per criterion, each printing its pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` or `purcell selftest`.
"""

import pytest

from purcell import selftest


def _assert_check(check):
    result = check()
    tag = "PASS" if result.passed else "FAIL"
    print(f"{tag} {result.name}: {result.detail}")
    assert result.passed, result.detail


def test_criterion_01_controllability_rank():
    _assert_check(selftest.check_controllability_rank)


def test_criterion_02_coefficient_zero_pattern():
    _assert_check(selftest.check_coefficient_pattern)


def test_criterion_03_commutator_convergence():
    _assert_check(selftest.check_commutator_convergence)


def test_criterion_04_gait_variant_equivalence():
    _assert_check(selftest.check_variant_equivalence)


def test_criterion_05_leakage_decay_in_n():
    _assert_check(selftest.check_leakage_decay)


def test_criterion_06_integrator_convergence_and_equivariance():
    _assert_check(selftest.check_integrator)


def test_criterion_07_schedule_closure():
    _assert_check(selftest.check_schedule_closure)


def test_criterion_08_polygon_tracking():
    _assert_check(selftest.check_polygon_tracking)


def test_criterion_09_line_planning_angle():
    _assert_check(selftest.check_line_planning)


def test_criterion_10_oracle_equivalence():
    _assert_check(selftest.check_oracle_equivalence)


def test_criterion_11_long_horizon_boundedness():
    _assert_check(selftest.check_boundedness)
