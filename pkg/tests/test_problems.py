import math

import numpy as np
import pytest

from proxpareto import (
    CapacityError,
    ConstraintSet,
    DataError,
    DomainError,
    Grid,
    MOProblem,
    RealSet1D,
    RegularizedProblem,
    VectorFunction,
    dist_subdiff,
    distance_and_projection,
    dominates,
    is_pareto_point,
    normal_cone,
    pareto_bruteforce,
    penalized_value,
    phi_gamma,
    phi_gamma_scan,
)
from proxpareto.expressions import Scale
from proxpareto.type_constructors import Var

from .conftest import one_piece


def abs_regularized(absolute):
    problem = MOProblem(VectorFunction((absolute,)), ConstraintSet.whole(1))
    return RegularizedProblem(problem, (1.0,), 1.0, (1.0,))


def test_distance_and_projection():
    half_line = ConstraintSet.box([0.0], [math.inf])
    d, y = distance_and_projection(half_line, [-2.0])
    assert d == pytest.approx(2.0)
    np.testing.assert_allclose(y, [0.0])

    d, y = distance_and_projection(ConstraintSet.box([1.0], [2.0]), [1.5])
    assert d == 0.0
    np.testing.assert_allclose(y, [1.5])

    halfspace = ConstraintSet.polyhedron([[1.0, 1.0]], [0.0], [0.0, 0.0])
    d, y = distance_and_projection(halfspace, [1.0, 1.0])
    assert d == pytest.approx(math.sqrt(2.0))
    np.testing.assert_allclose(y, [0.0, 0.0], atol=1e-12)


def test_normal_cones():
    half_line = ConstraintSet.box([0.0], [math.inf])
    assert normal_cone(half_line, [0.0]).generators == ((-1.0,),)
    assert normal_cone(ConstraintSet.box([1.0], [2.0]), [1.5]).is_trivial
    quadrant = ConstraintSet.box([0.0, 0.0], [math.inf, math.inf])
    assert set(normal_cone(quadrant, [0.0, 0.0]).generators) == {(-1.0, 0.0), (0.0, -1.0)}
    with pytest.raises(DomainError):
        normal_cone(half_line, [-1.0])


def test_distance_subdifferential():
    assert dist_subdiff(ConstraintSet.box([0.0], [math.inf]), [0.0]) == RealSet1D.interval(-1, 0)
    assert dist_subdiff(ConstraintSet.box([1.0], [2.0]), [1.5]).is_zero
    assert dist_subdiff(ConstraintSet.box([1.0], [2.0]), [2.0]) == RealSet1D.interval(0, 1)


def test_constraint_set_validation():
    with pytest.raises(DataError):
        ConstraintSet.box([1.0], [0.0])
    with pytest.raises(DataError):
        ConstraintSet.polyhedron([[1.0]], [0.0], [1.0])
    with pytest.raises(DataError):
        ConstraintSet("ellipse", 1)


def test_dominance():
    assert dominates([1.0, 2.0], [1.0, 3.0])
    assert not dominates([1.0, 2.0], [1.0, 2.0])
    assert not dominates([0.0, 3.0], [1.0, 2.0])


def test_grid_lattice_and_cap():
    grid = Grid(((-1.0, 1.0),), 0.5)
    np.testing.assert_allclose(grid.points().ravel(), [-1.0, -0.5, 0.0, 0.5, 1.0])
    assert Grid(((0.0, 1.0), (0.0, 1.0)), 0.1).size == 121
    with pytest.raises(CapacityError):
        Grid(((0.0, 1.0), (0.0, 1.0)), 1e-3, cap=1000).points()
    with pytest.raises(DataError):
        Grid(((0.0, 1.0),), 0.0)


def test_kinked_pair_pareto_set(kinked_pair):
    result = pareto_bruteforce(kinked_pair.problem(), Grid(((-3.0, 2.0),), 1e-3))
    lo, hi = result.hull()
    assert lo[0] == pytest.approx(-1.0, abs=1e-3)
    assert hi[0] == pytest.approx(-0.5, abs=1e-3)


def test_quadratic_pair_pareto_set(quadratic_pair):
    result = pareto_bruteforce(quadratic_pair.problem(), Grid(((-2.0, 3.0),), 1e-3))
    lo, hi = result.hull()
    assert lo[0] == pytest.approx(0.0, abs=1e-3)
    assert hi[0] == pytest.approx(1.0, abs=1e-3)


def test_pareto_lattice_is_dominance_free_and_complete(quadratic_pair):
    problem = quadratic_pair.problem()
    grid = Grid(((-1.0, 2.0),), 0.05)
    result = pareto_bruteforce(problem, grid)
    for a in result.values:
        assert not any(dominates(b, a) for b in result.values)
    front = {tuple(x) for x in result.points}
    values = problem.objective.evaluate_many(grid.points())
    for x, fx in zip(grid.points(), values):
        if tuple(x) not in front:
            assert any(dominates(v, fx) for v in result.values)


def test_total_trade_off_keeps_every_point():
    up, down = one_piece(Var()), one_piece(Scale(-1.0, Var()))
    problem = MOProblem(VectorFunction((up, down)), ConstraintSet.whole(1))
    grid = Grid(((-1.0, 1.0),), 0.25)
    assert len(pareto_bruteforce(problem, grid)) == grid.size


def test_threads_do_not_change_the_lattice(kinked_pair):
    grid = Grid(((-3.0, 2.0),), 1e-3)
    serial = pareto_bruteforce(kinked_pair.problem(), grid, threads=1)
    threaded = pareto_bruteforce(kinked_pair.problem(), grid, threads=3)
    np.testing.assert_array_equal(serial.points, threaded.points)


def test_is_pareto_point(quadratic_pair):
    problem = quadratic_pair.problem()
    grid = Grid(((-1.0, 2.0),), 0.01)
    assert is_pareto_point(problem, [0.5], grid)
    assert not is_pareto_point(problem, [1.5], grid)


def test_regularized_problem_level_set(kinked_pair):
    rp = kinked_pair.regularized()
    assert rp.in_level_set([-1.0])
    assert not rp.in_level_set([-0.9])
    with pytest.raises(DomainError):
        RegularizedProblem(
            MOProblem(kinked_pair.F, ConstraintSet.box([0.0], [1.0])), (-1.0,), 1.0, (1.0, 0.0)
        )


def test_phi_gamma_by_hand(absolute):
    rp = abs_regularized(absolute)
    assert phi_gamma(rp, [0.5], 0.1, [0.0]) == pytest.approx(0.35)
    assert phi_gamma(rp, [0.5], 0.1, [0.5]) == pytest.approx(0.1)
    with pytest.raises(DataError):
        phi_gamma(rp, [0.5], 0.0, [0.0])


def test_scan_is_positive_at_a_regularized_pareto_point(kinked_pair):
    rp = kinked_pair.regularized()
    scan = phi_gamma_scan(rp, [-1.0], 0.01, Grid(((-3.0, 2.0),), 1e-3))
    assert scan.positive
    assert scan.minimum > 0


def test_scan_positive_over_the_regularized_lattice(abs_prox):
    rp = abs_prox.regularized()
    grid = Grid(((-1.0, 2.0),), 0.01)
    front = pareto_bruteforce(rp, grid)
    for xbar in front.points:
        for gamma in (1e-3, 1e-2, 1e-1):
            assert phi_gamma_scan(rp, xbar, gamma, grid).positive


def test_scan_refutes_a_dominated_point(absolute):
    rp = abs_regularized(absolute)
    scan = phi_gamma_scan(rp, [0.9], 1e-3, Grid(((-1.0, 2.0),), 0.01))
    assert not scan.positive


def test_penalized_value(absolute):
    omega = ConstraintSet.box([1.0], [2.0])
    values = penalized_value(absolute, omega, 2.0, [[0.5], [1.5]])
    np.testing.assert_allclose(values, [1.5, 1.5])


@pytest.mark.parametrize(
    "omega",
    [
        ConstraintSet.box([0.0, -1.0], [1.0, 2.0]),
        ConstraintSet.box([0.0, -math.inf], [math.inf, 0.0]),
        ConstraintSet.polyhedron([[1.0, 1.0], [-1.0, 2.0]], [0.0, 1.0], [0.0, 0.0]),
    ],
)
def test_distance_is_one_lipschitz(omega):
    rng = np.random.default_rng(0)
    for x, y in rng.uniform(-4.0, 4.0, size=(200, 2, 2)):
        dx, _ = distance_and_projection(omega, x)
        dy, _ = distance_and_projection(omega, y)
        assert abs(dx - dy) <= np.linalg.norm(x - y) + 1e-9
