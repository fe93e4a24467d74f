import math

import numpy as np
import pytest

from proxpareto import (
    DomainError,
    NotLipschitzError,
    RealSet1D,
    clarke,
    clarke_dirderiv,
    combine,
    frechet_subdiff,
    limiting_subdiff,
    numeric_frechet_probe,
    robustness_check,
    singular_subdiff,
    subdiff_report,
    sum_rule,
)
from proxpareto.expressions import Abs, Constant, Min, Oscillatory, Scale
from proxpareto.functions import AffineInequality, Piece, PiecewiseFunction
from proxpareto.type_constructors import Root, Var

from .conftest import one_piece


def test_cube_root_at_zero(cube_root):
    report = subdiff_report(cube_root, 0.0)
    assert report.frechet.is_empty
    assert report.limiting.is_empty
    assert report.singular == RealSet1D.ray(1)
    assert not report.lipschitz
    assert report.clarke is None


def test_negative_abs_has_two_limiting_slopes():
    f = one_piece(Scale(-1.0, Abs(Var())))
    assert frechet_subdiff(f, 0.0).is_empty
    assert limiting_subdiff(f, 0.0) == RealSet1D.of_points([-1, 1])
    assert singular_subdiff(f, 0.0).is_zero
    assert clarke(f, 0.0) == RealSet1D.interval(-1, 1)


def test_min_with_zero():
    f = one_piece(Min((Var(), Constant(0.0))))
    assert frechet_subdiff(f, 0.0).is_empty
    assert limiting_subdiff(f, 0.0) == RealSet1D.of_points([0, 1])


def test_abs_and_smooth_points(absolute, square):
    assert frechet_subdiff(absolute, 0.0) == RealSet1D.interval(-1, 1)
    assert limiting_subdiff(absolute, 0.0) == RealSet1D.interval(-1, 1)
    assert limiting_subdiff(square, 1.0) == RealSet1D.point(2.0)
    assert clarke(square, 1.0) == RealSet1D.point(2.0)


def test_oscillating_branch(oscillating):
    # the upper oscillation envelope x/2 caps the right side at -1/2
    report = subdiff_report(oscillating, 0.0)
    assert report.frechet.isclose(RealSet1D.interval(-1.0, -0.5), tol=1e-12)
    assert report.limiting == RealSet1D.whole()
    assert report.singular == RealSet1D.whole()
    assert not report.lipschitz


def test_clarke_needs_lipschitz(cube_root):
    with pytest.raises(NotLipschitzError):
        clarke(cube_root, 0.0)


def test_off_domain_point_is_rejected():
    half = PiecewiseFunction(1, (Piece((AffineInequality.lower(0.0),), Root(Var(), "1/2")),), True)
    with pytest.raises(DomainError):
        subdiff_report(half, -1.0)


def test_boundary_of_domain():
    half = PiecewiseFunction(1, (Piece((AffineInequality.lower(0.0),), Var()),), True)
    assert frechet_subdiff(half, 0.0) == RealSet1D.interval(-math.inf, 1.0)
    assert singular_subdiff(half, 0.0) == RealSet1D.ray(-1)


def test_downward_jump_empties_regular_set():
    step = PiecewiseFunction(
        1,
        (
            Piece((AffineInequality.lower(0.0, strict=True),), Constant(-1.0)),
            Piece((AffineInequality.upper(0.0),), Constant(0.0)),
        ),
        False,
    )
    assert frechet_subdiff(step, 0.0).is_empty


def test_sum_rule_qualification(absolute, cube_root):
    negative_abs = one_piece(Scale(-1.0, Abs(Var())))
    qualified = sum_rule([absolute, negative_abs], 0.0)
    assert qualified.qualified
    assert qualified.outer == RealSet1D.interval(-2, 2)

    negative_root = one_piece(Scale(-1.0, Root(Var(), "1/3")))
    assert not sum_rule([cube_root, negative_root], 0.0).qualified


def test_sum_rule_with_oscillating_branch(cube_root, oscillating):
    result = sum_rule([cube_root, oscillating], 0.0)
    assert not result.qualified
    assert result.singular[1] == RealSet1D.whole()


def test_clarke_directional_derivative(absolute, square):
    assert clarke_dirderiv(absolute, 0.0, 1.0) == pytest.approx(1.0, abs=1e-6)
    assert clarke_dirderiv(absolute, 0.0, -1.0) == pytest.approx(1.0, abs=1e-6)
    assert clarke_dirderiv(square, 1.0, 1.0) == pytest.approx(2.0, abs=1e-2)
    assert clarke_dirderiv(square, 1.0, 0.0) == 0.0


def test_robustness_of_abs(absolute):
    result = robustness_check(absolute, 0.0, trials=10, seed=3)
    assert result.passed
    assert result.trials == 10


def test_numeric_probe_matches_exact_set(absolute):
    probed = numeric_frechet_probe(absolute, 0.0)
    assert probed.approximate
    assert probed.isclose(RealSet1D.interval(-1, 1), tol=1e-9)


def test_damped_oscillation_is_lipschitz():
    f = one_piece(Oscillatory(Var(), 2))
    report = subdiff_report(f, 0.0)
    assert report.frechet.isclose(RealSet1D.point(0.0), tol=1e-12)
    assert report.limiting == RealSet1D.interval(-1, 1)
    assert report.singular.is_zero
    assert report.clarke == RealSet1D.interval(-1, 1)


def test_clarke_directional_derivative_of_damped_oscillation():
    f = one_piece(Oscillatory(Var(), 2))
    assert clarke_dirderiv(f, 0.0, 1.0) == pytest.approx(1.0, abs=1e-3)
    assert clarke_dirderiv(f, 0.0, -1.0) == pytest.approx(1.0, abs=1e-3)
    assert clarke_dirderiv(f, 0.0, 2.0) == pytest.approx(2.0 * clarke(f, 0.0).supremum, abs=1e-3)


ATOMS = {
    "cbrt": one_piece(Root(Var(), "1/3")),
    "abs": one_piece(Abs(Var())),
    "negative_abs": one_piece(Scale(-1.0, Abs(Var()))),
    "oscillating": PiecewiseFunction(
        1,
        (
            Piece((AffineInequality.lower(0.0, strict=True),), Scale(0.5, Oscillatory(Var(), 1))),
            Piece((AffineInequality.upper(0.0),), Scale(-1.0, Var())),
        ),
        True,
    ),
    "damped": one_piece(Oscillatory(Var(), 2)),
}


@pytest.mark.parametrize("name", sorted(ATOMS))
def test_set_inclusions_at_random_points(name):
    f = ATOMS[name]
    rng = np.random.default_rng(0)
    points = np.r_[0.0, rng.uniform(-2.0, 2.0, 1999)]
    for x in points:
        report = subdiff_report(f, float(x))
        assert report.frechet.is_subset(report.limiting, tol=1e-6), x
        if report.lipschitz:
            assert report.clarke == report.limiting.convex_hull()
            assert clarke_dirderiv(f, float(x), 1.0) == pytest.approx(report.clarke.supremum, abs=1e-9)
            assert clarke_dirderiv(f, float(x), -1.0) == pytest.approx(-report.clarke.infimum, abs=1e-9)


def test_sum_rule_matches_the_combined_function(absolute):
    negative = one_piece(Scale(-1.0, Var()))
    result = sum_rule([absolute, negative], 0.0)
    assert result.qualified
    assert result.outer.isclose(RealSet1D.interval(-2, 0), tol=1e-12)
    combined = combine("sum", [absolute, negative])
    assert limiting_subdiff(combined, 0.0).isclose(RealSet1D.interval(-2, 0), tol=1e-12)


def test_robustness_of_negative_abs_and_cube_root(cube_root):
    negative_abs = one_piece(Scale(-1.0, Abs(Var())))
    result = robustness_check(negative_abs, 0.0, trials=10, seed=1)
    assert result.passed
    assert result.convergent == 10

    # the slopes of the cube root never settle near 0
    result = robustness_check(cube_root, 0.0, trials=10, seed=1)
    assert result.passed
    assert result.convergent == 0
