"""
Proximal-point solver for multiobjective problems.

Each outer step regularizes the problem at the current point and descends
the penalized, Ekeland-perturbed scalarization

    chi(x) = phi_gamma(x) + sqrt(gamma) * ||x - z|| + tau * d_omega(x)

(phi_gamma anchored at the incumbent z) over a decreasing gamma schedule
with a derivative-free multistart pattern search.

"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .certifier import CertificateOptions, MultiplierCertificate, certify_pareto, penalty_tau_from_dl
from .dirlip import DLSchedule
from .exceptions import AnalysisError, DataError, DomainError, PreconditionError
from .expressions import Constant, Sum
from .functions import PiecewiseFunction, combine
from .logging_utils import logger
from .parallel import ordered_map
from .problems import MOProblem, RegularizedProblem, _phi_gamma_many
from .type_constructors import Point
from .types_definitions import JSONDict, Matrix, Vector, VectorLike

__all__ = [
    "SolverConfig",
    "InnerRecord",
    "OuterStep",
    "SolverTrace",
    "ScalarizedObjective",
    "scalarized_value",
    "pattern_search",
    "proximal_step",
    "solve_ppa",
]

DESCENT_MARGIN = 1e-15
MAX_TAU_DOUBLINGS = 20


@dataclass(frozen=True)
class SolverConfig:
    gammas: Tuple[float, ...] = tuple(10.0 ** -k for k in range(1, 13))
    tau_growth: float = 2.0
    multistart: int = 9
    start_radius: float = 1.0
    steps: Tuple[float, ...] = tuple(2.0 ** -k for k in range(1, 21))
    max_evaluations: int = 200000
    step_tol: float = 1e-6
    max_outer: int = 50
    certificate_tol: float = 1e-3
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("gammas", "steps"):
            values = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, values)
            if not values or any(v <= 0 for v in values):
                raise DataError(f"{name} must be a nonempty list of positive numbers")
            if any(b >= a for a, b in zip(values, values[1:])):
                raise DataError(f"{name} must be strictly decreasing")
        if self.tau_growth <= 1 or self.step_tol <= 0 or self.certificate_tol <= 0:
            raise DataError("tau growth must exceed 1 and tolerances must be positive")
        if self.multistart < 1 or self.max_outer < 1 or self.max_evaluations < 1:
            raise DataError("multistart, max_outer and max_evaluations must be positive")


@dataclass(frozen=True)
class ScalarizedObjective:
    rp: RegularizedProblem
    reference: Tuple[float, ...]
    gamma: float
    anchor: Tuple[float, ...]
    tau: float

    def evaluate_many(self, points: Matrix) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        phi = _phi_gamma_many(self.rp, np.asarray(self.reference), self.gamma, X)
        ekeland = math.sqrt(self.gamma) * np.linalg.norm(X - np.asarray(self.anchor), axis=1)
        penalty = self.tau * self.rp.omega.distance_many(X) if self.tau else 0.0
        values = phi + ekeland + penalty
        values[np.isnan(values)] = math.inf
        return values

    def __call__(self, x: VectorLike) -> float:
        return float(self.evaluate_many(Point(x)[None, :])[0])


def scalarized_value(
    rp: RegularizedProblem,
    reference: VectorLike,
    gamma: float,
    anchor: VectorLike,
    tau: float,
    x: VectorLike,
) -> float:
    """phi_gamma(x) + sqrt(gamma)*||x - anchor|| + tau*d_omega(x)."""
    if tau < 0:
        raise DataError(f"tau must be nonnegative, got {tau}")
    return ScalarizedObjective(rp, tuple(Point(reference)), gamma, tuple(Point(anchor)), tau)(x)


def pattern_search(
    objective, starts: np.ndarray, steps: Tuple[float, ...], max_evaluations: int
) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Compass search run in lockstep from every start: at each step size,
    move every start to its best improving neighbour x +- h*e_i until none
    improves, then shrink. `max_evaluations` caps the moves of each start
    separately, so a start's path never depends on the others.

    """
    X = np.array(starts, dtype=float)
    S, n = X.shape
    values = objective.evaluate_many(X)
    evaluations = S
    moves = np.vstack([np.eye(n), -np.eye(n)])
    budget = max(max_evaluations // (2 * n), 1)
    made = np.zeros(S, dtype=int)
    for h in steps:
        active = made < budget
        while active.any():
            candidates = X[active][:, None, :] + h * moves[None, :, :]
            cv = objective.evaluate_many(candidates.reshape(-1, n)).reshape(-1, 2 * n)
            evaluations += cv.size
            best = np.argmin(cv, axis=1)
            best_values = cv[np.arange(len(cv)), best]
            improved = best_values < values[active] - DESCENT_MARGIN
            if not improved.any():
                break
            rows = np.flatnonzero(active)[improved]
            X[rows] = candidates[improved, best[improved]]
            values[rows] = best_values[improved]
            made[rows] += 1
            active = np.zeros(S, dtype=bool)
            active[rows] = made[rows] < budget
    return X, values, evaluations


@dataclass(frozen=True)
class InnerRecord:
    gamma: float
    incumbent: Tuple[float, ...]
    value: float
    penalty: float
    tau: float
    evaluations: int
    accepted: bool

    def to_dict(self) -> JSONDict:
        return {
            "gamma": self.gamma,
            "incumbent": list(self.incumbent),
            "value": self.value,
            "penalty": self.penalty,
            "tau": self.tau,
            "evaluations": self.evaluations,
            "accepted": self.accepted,
        }


@dataclass(frozen=True)
class OuterStep:
    k: int
    x: Tuple[float, ...]
    F: Tuple[float, ...]
    gamma_floor: Optional[float]
    null_step: bool
    records: Tuple[InnerRecord, ...] = ()

    def row(self) -> JSONDict:
        return {
            "k": self.k,
            "x": list(self.x),
            "F": list(self.F),
            "gamma_floor": self.gamma_floor,
            "null_step": self.null_step,
        }


@dataclass
class SolverTrace:
    steps: List[OuterStep] = field(default_factory=list)
    termination: str = ""
    certificate: Optional[MultiplierCertificate] = None
    certificate_error: Optional[str] = None

    @property
    def final(self) -> Vector:
        return np.asarray(self.steps[-1].x)

    @property
    def iterates(self) -> List[Vector]:
        return [np.asarray(s.x) for s in self.steps]

    def is_monotone(self, tol: float = 1e-10) -> bool:
        values = [np.asarray(s.F) for s in self.steps]
        return all(np.all(b <= a + tol) for a, b in zip(values, values[1:]))

    def rows(self) -> List[JSONDict]:
        verdict = self.certificate.verdict if self.certificate else self.certificate_error
        out = [s.row() for s in self.steps]
        if out:
            out[-1]["certificate"] = verdict
        return out

    def to_dict(self) -> JSONDict:
        return {
            "termination": self.termination,
            "rows": self.rows(),
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "certificate_error": self.certificate_error,
        }


def _scalarization(rp: RegularizedProblem, reference: Vector, gamma: float) -> PiecewiseFunction:
    """phi_gamma as a piecewise function, for directional Lipschitz seeding."""
    psi_ref = rp.psi(reference)
    terms = []
    for psi_i, f_i, shift, level in zip(rp.psi, rp.F, psi_ref, rp.center_values):
        terms.append(psi_i.map_bodies(lambda body, c=gamma - shift: Sum((body, Constant(c)))))
        terms.append(f_i.map_bodies(lambda body, c=-level: Sum((body, Constant(c)))))
    return combine("max", terms)


def _seed_tau(rp: RegularizedProblem, gamma: float, config: SolverConfig) -> float:
    if rp.omega.kind == "whole":
        return 1.0
    center = rp.center_point
    try:
        phi = _scalarization(rp, center, gamma)
        schedule = DLSchedule(samples=32, seed=config.seed, threads=config.threads)
        return penalty_tau_from_dl(phi, rp.omega, center, schedule)
    except (AnalysisError, ValueError) as exc:
        logger.info(f"penalty seed falls back to 1.0 at {center}: {exc}")
        return 1.0


def _starts(z: Vector, config: SolverConfig, salt: int) -> np.ndarray:
    n = len(z)
    if config.multistart == 1:
        return z[None, :].copy()
    if n == 1:
        offsets = np.linspace(-1.0, 1.0, config.multistart)[:, None]
    else:
        rng = np.random.default_rng([config.seed, salt])
        offsets = rng.uniform(-1.0, 1.0, size=(config.multistart - 1, n))
        offsets = np.vstack([np.zeros((1, n)), offsets])
    return z[None, :] + config.start_radius * offsets


def _multistart(objective: ScalarizedObjective, starts: np.ndarray, config: SolverConfig):
    """Pattern search from every start, chunked over the worker threads."""
    chunks = [c for c in np.array_split(starts, max(config.threads, 1)) if len(c)]
    parts = ordered_map(
        lambda chunk: pattern_search(objective, chunk, config.steps, config.max_evaluations),
        chunks,
        config.threads,
    )
    X = np.vstack([p[0] for p in parts])
    values = np.concatenate([p[1] for p in parts])
    return X, values, sum(p[2] for p in parts)


def _pick(rp: RegularizedProblem, objective: ScalarizedObjective, X: np.ndarray,
          values: np.ndarray, z: Vector) -> Optional[int]:
    """
    Best final start, by (value, start index), that lies in D, does not
    raise any Psi component above its value at the center and improves on
    the incumbent z.

    """
    current = objective(z)
    psi_center = rp.psi(rp.center_point)
    in_level = rp.feasible_mask(X)
    with np.errstate(invalid="ignore"):
        no_worse = np.all(rp.psi.evaluate_many(X) <= psi_center + DESCENT_MARGIN, axis=1)
    ok = in_level & no_worse & (values < current - DESCENT_MARGIN)
    if not ok.any():
        return None
    candidates = np.flatnonzero(ok)
    return int(candidates[np.argmin(values[candidates])])


@dataclass(frozen=True)
class StepResult:
    x_next: Vector
    records: Tuple[InnerRecord, ...]
    tau: float
    gamma_floor: float
    null_step: bool


def proximal_step(
    problem: MOProblem,
    center: VectorLike,
    lam: float,
    weights: VectorLike,
    config: Optional[SolverConfig] = None,
    tau: Optional[float] = None,
    salt: int = 0,
) -> StepResult:
    """
    One proximal step from `center`: gamma continuation of the scalarized
    problem, accepting incumbents that stay in D and lower chi. With no
    accepted move the gamma floor is halved once, then the step is null.

    """
    config = config or SolverConfig()
    center = Point(center)
    logger.debug(f"proximal_step from {center} lam={lam}")
    if not problem.omega.contains(center):
        raise DomainError(f"proximal center {center} lies outside the constraint set")
    rp = RegularizedProblem(problem, tuple(center), lam, tuple(np.atleast_1d(weights)))
    tau = _seed_tau(rp, config.gammas[0], config) if tau is None else tau

    z = center.copy()
    records: List[InnerRecord] = []
    gammas = list(config.gammas)
    halved = False
    level = 0
    while level < len(gammas):
        gamma = gammas[level]
        for _ in range(MAX_TAU_DOUBLINGS + 1):
            objective = ScalarizedObjective(rp, tuple(z), gamma, tuple(z), tau)
            X, values, evaluations = _multistart(objective, _starts(z, config, salt * 1000 + level), config)
            best = int(np.argmin(values))
            if rp.omega.contains(X[best]) or not math.isfinite(values[best]):
                break
            tau *= config.tau_growth
            logger.info(f"search left the constraint set at gamma={gamma}; tau doubled to {tau}")
        choice = _pick(rp, objective, X, values, z)
        accepted = choice is not None
        if accepted:
            z = X[choice].copy()
        value = objective(z)
        penalty = tau * float(rp.omega.distance_many(z[None, :])[0])
        records.append(InnerRecord(gamma, tuple(float(c) for c in z), value, penalty, tau, evaluations, accepted))
        level += 1
        if level == len(gammas) and not halved and np.array_equal(z, center):
            halved = True
            gammas.append(gammas[-1] / 2.0)

    null_step = np.array_equal(z, center)
    if null_step:
        logger.info(f"null proximal step at {center}")
    return StepResult(z, tuple(records), tau, gammas[-1], null_step)


def solve_ppa(
    problem: MOProblem,
    x0: VectorLike,
    lam: float,
    weights: VectorLike,
    config: Optional[SolverConfig] = None,
) -> SolverTrace:
    """
    Iterate proximal steps until the move is below the step tolerance or
    the iteration budget runs out, then certify the final point against
    the last regularized problem.

    """
    config = config or SolverConfig()
    x = Point(x0)
    logger.debug(f"solve_ppa from {x} lam={lam}")
    if not problem.omega.contains(x):
        raise DomainError(f"starting point {x} lies outside the constraint set")
    trace = SolverTrace()
    start_values = tuple(float(v) for v in problem.F(x))
    trace.steps.append(OuterStep(0, tuple(float(c) for c in x), start_values, None, False))
    tau = None
    last_center = x
    for k in range(1, config.max_outer + 1):
        result = proximal_step(problem, x, lam, weights, config, tau, salt=k)
        tau = result.tau
        last_center = x
        trace.steps.append(OuterStep(
            k,
            tuple(float(c) for c in result.x_next),
            tuple(float(v) for v in problem.F(result.x_next)),
            result.gamma_floor,
            result.null_step,
            result.records,
        ))
        moved = float(np.linalg.norm(result.x_next - x))
        x = result.x_next
        if moved <= config.step_tol:
            trace.termination = "step tolerance"
            break
    else:
        trace.termination = "max iterations"

    rp = RegularizedProblem(problem, tuple(last_center), lam, tuple(np.atleast_1d(weights)))
    try:
        trace.certificate = certify_pareto(
            rp, x, CertificateOptions(tol=config.certificate_tol, threads=config.threads)
        )
    except (PreconditionError, DomainError) as exc:
        logger.warning(f"final point {x} could not be certified: {exc}")
        trace.certificate_error = str(exc)
    return trace
