import math

import numpy as np
import pytest

from proxpareto import (
    DataError,
    DLSchedule,
    DomainError,
    PiecewiseFunction,
    certify_dl,
    dl_calculus_check,
    quotient_limsup,
)
from proxpareto.dirlip import DL, NOT_DL, analyze_direction, candidate_directions
from proxpareto.expressions import Abs, Scale, Sum
from proxpareto.type_constructors import Root, Var

from .conftest import one_piece


def cube_root_sum(n):
    return PiecewiseFunction.single(Sum(tuple(Root(Var(i, n), "1/3") for i in range(n))), n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sum_of_cube_roots_is_dl_towards_the_negative_orthant(n):
    report = certify_dl(cube_root_sum(n), np.zeros(n))
    assert report.verdict == DL
    witness = np.asarray(report.direction)
    assert float(witness @ (-np.ones(n) / math.sqrt(n))) >= 0.9
    assert report.constant <= 1e-3
    assert report.radius > 0


def test_cube_root_blows_up_upwards(cube_root):
    result = analyze_direction(cube_root, [0.0], [1.0])
    assert result.verdict == NOT_DL
    assert -0.8 <= result.slope <= -0.5
    assert result.constant is None


def test_cusp_is_not_dl():
    cusp = one_piece(Root(Abs(Var()), "1/3"))
    report = certify_dl(cusp, [0.0])
    assert report.verdict == NOT_DL
    assert not report.is_dl
    assert report.constant is None and report.radius is None


def test_lipschitz_function_is_dl_everywhere(absolute):
    report = certify_dl(absolute, [0.0])
    assert report.is_dl
    assert report.constant == pytest.approx(1.0, abs=0.1)


def test_quotients_are_reproducible(cube_root):
    schedule = DLSchedule(seed=7)
    first = quotient_limsup(cube_root, [0.0], [-1.0], schedule)
    second = quotient_limsup(cube_root, [0.0], [-1.0], schedule)
    np.testing.assert_array_equal(first, second)
    assert len(first) == len(schedule.levels)
    assert np.all(first <= 0.0)


def test_thread_count_does_not_change_the_verdict():
    f = cube_root_sum(2)
    serial = certify_dl(f, [0.0, 0.0], DLSchedule(threads=1))
    threaded = certify_dl(f, [0.0, 0.0], DLSchedule(threads=4))
    assert serial.to_dict() == threaded.to_dict()


def test_schedule_and_direction_validation(cube_root):
    with pytest.raises(DataError):
        DLSchedule(levels=(1e-2,))
    with pytest.raises(DataError):
        DLSchedule(levels=(1e-4, 1e-2))
    with pytest.raises(DataError):
        quotient_limsup(cube_root, [0.0], [2.0])
    with pytest.raises(DataError):
        candidate_directions(4)


def test_off_domain_point(cube_root):
    half = one_piece(Root(Var(), "1/2"))
    with pytest.raises(DomainError):
        quotient_limsup(half, [-1.0], [1.0])


def test_calculus_rules_hold_for_common_direction(cube_root):
    negative = one_piece(Scale(-1.0, Var()))
    for kind in ("sum", "max"):
        result = dl_calculus_check(kind, cube_root, negative, [0.0], [-1.0])
        assert result.passed, result.message


def test_calculus_rule_needs_certified_members(cube_root):
    result = dl_calculus_check("sum", cube_root, cube_root, [0.0], [1.0])
    assert result.status == "precondition"


def test_constants_scale_with_the_function():
    scales = (0.5, 1.0, 2.0, 4.0)
    results = [analyze_direction(one_piece(Scale(c, Abs(Var()))), [0.0], [1.0]) for c in scales]
    assert all(r.verdict == DL for r in results)
    constants = [r.constant for r in results]
    assert constants == sorted(constants)
    for c, constant in zip(scales, constants):
        assert constant == pytest.approx(c * constants[1], rel=1e-9)

    reports = [certify_dl(one_piece(Scale(c, Abs(Var()))), [0.0]) for c in scales]
    assert [r.direction for r in reports] == [reports[1].direction] * len(scales)
    for c, report in zip(scales, reports):
        assert report.constant == pytest.approx(c * reports[1].constant, rel=1e-9)
