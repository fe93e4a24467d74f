import numpy as np
import pytest

from proxpareto import (
    ConstraintSet,
    DataError,
    DomainError,
    MOProblem,
    RegularizedProblem,
    SolverConfig,
    VectorFunction,
    proximal_step,
    scalarized_value,
    solve_ppa,
)
from proxpareto.solver import ScalarizedObjective, pattern_search

HALF_STEPS = tuple(2.0 ** -k for k in range(1, 21))


def abs_regularized(absolute):
    problem = MOProblem(VectorFunction((absolute,)), ConstraintSet.whole(1))
    return RegularizedProblem(problem, (1.0,), 1.0, (1.0,))


class Bowl:
    def evaluate_many(self, points):
        return np.sum(np.asarray(points) ** 2, axis=1)


def test_scalarized_value_by_hand(absolute):
    rp = abs_regularized(absolute)
    # phi_gamma(0) = 1 - 0.75 + 0.04, Ekeland term 0.2 * 0.5
    assert scalarized_value(rp, [0.5], 0.04, [0.5], 0.0, [0.0]) == pytest.approx(0.39)
    assert scalarized_value(rp, [0.5], 0.04, [0.5], 0.0, [0.5]) == pytest.approx(0.04)
    with pytest.raises(DataError):
        scalarized_value(rp, [0.5], 0.04, [0.5], -1.0, [0.0])


def test_penalty_term_outside_the_constraint_set(absolute):
    problem = MOProblem(VectorFunction((absolute,)), ConstraintSet.box([0.0], [2.0]))
    rp = RegularizedProblem(problem, (1.0,), 1.0, (1.0,))
    inside = ScalarizedObjective(rp, (1.0,), 0.01, (1.0,), 0.0)([-0.5])
    penalized = ScalarizedObjective(rp, (1.0,), 0.01, (1.0,), 3.0)([-0.5])
    assert penalized - inside == pytest.approx(1.5)


def test_pattern_search_finds_the_bowl_bottom():
    X, values, evaluations = pattern_search(Bowl(), np.array([[3.0, -1.25]]), HALF_STEPS, 10000)
    np.testing.assert_allclose(X[0], [0.0, 0.0], atol=1e-6)
    assert values[0] == pytest.approx(0.0, abs=1e-12)
    assert evaluations > 1


def test_pattern_search_respects_the_move_budget():
    X, _, _ = pattern_search(Bowl(), np.array([[3.0]]), (0.5,), 4)
    # budget 4 // 2 = 2 moves of size 0.5
    np.testing.assert_allclose(X[0], [2.0])


@pytest.mark.parametrize("lam, expected", [(1.0, 0.5), (0.5, 1.0 / 3.0)])
def test_scalar_proximal_step(square_problem, lam, expected):
    result = proximal_step(square_problem, [1.0], lam, [1.0])
    assert not result.null_step
    assert result.x_next[0] == pytest.approx(expected, abs=1e-4)
    assert any(r.accepted for r in result.records)


def test_proximal_step_does_not_increase_objectives(quadratic_pair):
    problem = quadratic_pair.problem()
    weights = quadratic_pair.regularization.weights
    result = proximal_step(problem, [2.0], 1.0, weights)
    assert np.all(problem.F(result.x_next) <= problem.F([2.0]) + 1e-10)
    assert result.x_next[0] < 2.0


def test_null_step_when_the_level_set_is_a_point(kinked_pair):
    weights = kinked_pair.regularization.weights
    config = SolverConfig()
    result = proximal_step(kinked_pair.problem(), [-1.0], 1.0, weights, config)
    assert result.null_step
    np.testing.assert_array_equal(result.x_next, [-1.0])
    assert result.gamma_floor == pytest.approx(config.gammas[-1] / 2.0)
    assert not any(r.accepted for r in result.records)


def test_proximal_step_needs_a_feasible_center(absolute):
    problem = MOProblem(VectorFunction((absolute,)), ConstraintSet.box([0.0], [1.0]))
    with pytest.raises(DomainError):
        proximal_step(problem, [2.0], 1.0, [1.0])


def test_scalar_iterates_contract_by_three(square_problem):
    trace = solve_ppa(square_problem, [1.0], 0.5, [1.0], SolverConfig(max_outer=12))
    iterates = [float(x[0]) for x in trace.iterates]
    assert iterates[0] == 1.0
    assert iterates[1] == pytest.approx(1.0 / 3.0, abs=1e-4)
    assert iterates[2] == pytest.approx(1.0 / 9.0, abs=1e-4)
    assert any(abs(x) <= 1e-3 for x in iterates[:9])
    assert trace.is_monotone()


def test_quadratic_pair_reaches_the_pareto_interval(quadratic_pair):
    weights = quadratic_pair.regularization.weights
    trace = solve_ppa(quadratic_pair.problem(), [2.0], 1.0, weights)
    final = float(trace.final[0])
    assert -1e-3 <= final <= 1.0 + 1e-3
    assert trace.is_monotone()
    assert trace.certificate is not None and trace.certificate.feasible
    assert trace.termination in ("step tolerance", "max iterations")


def test_kinked_pair_reaches_the_pareto_interval(kinked_pair):
    weights = kinked_pair.regularization.weights
    trace = solve_ppa(kinked_pair.problem(), [1.0], 1.0, weights)
    final = float(trace.final[0])
    assert -1.0 - 1e-2 <= final <= -0.5 + 1e-2
    assert trace.is_monotone()


def test_iteration_budget(square_problem):
    trace = solve_ppa(square_problem, [1.0], 0.5, [1.0], SolverConfig(max_outer=2))
    assert trace.termination == "max iterations"
    assert len(trace.steps) == 3
    rows = trace.rows()
    assert rows[-1]["certificate"] in ("feasible", "no certificate found")
    assert [r["k"] for r in rows] == [0, 1, 2]


def test_traces_do_not_depend_on_threads(square_problem):
    serial = solve_ppa(square_problem, [1.0], 0.5, [1.0], SolverConfig(max_outer=3, threads=1))
    threaded = solve_ppa(square_problem, [1.0], 0.5, [1.0], SolverConfig(max_outer=3, threads=3))
    assert serial.to_dict() == threaded.to_dict()


def test_trace_points_stay_in_the_constraint_set(absolute):
    omega = ConstraintSet.box([0.5], [3.0])
    problem = MOProblem(VectorFunction((absolute,)), omega)
    trace = solve_ppa(problem, [2.0], 1.0, [1.0], SolverConfig(max_outer=10))
    assert all(omega.contains(x) for x in trace.iterates)
    assert float(trace.final[0]) == pytest.approx(0.5, abs=1e-3)


def test_infeasible_start(absolute):
    problem = MOProblem(VectorFunction((absolute,)), ConstraintSet.box([0.0], [1.0]))
    with pytest.raises(DomainError):
        solve_ppa(problem, [5.0], 1.0, [1.0])


@pytest.mark.parametrize(
    "changes",
    [
        {"gammas": ()},
        {"gammas": (1e-2, 1e-1)},
        {"steps": (0.5, -0.25)},
        {"tau_growth": 1.0},
        {"multistart": 0},
        {"max_outer": 0},
    ],
)
def test_solver_config_validation(changes):
    with pytest.raises(DataError):
        SolverConfig(**changes)


def test_starting_on_a_pareto_point_is_a_fixed_point(kinked_pair):
    weights = kinked_pair.regularization.weights
    trace = solve_ppa(kinked_pair.problem(), [-1.0], 1.0, weights)
    assert trace.termination == "step tolerance"
    assert len(trace.steps) == 2
    assert trace.steps[1].null_step
    np.testing.assert_array_equal(trace.final, [-1.0])
    assert trace.certificate is not None and trace.certificate.feasible
