"""
Necessary optimality conditions for Pareto points of regularized
problems, exact penalization and local Lipschitz tests.

A multiplier certificate at x_bar is (alpha, beta, w) with

    0 in sum_i (alpha_i + beta_i) dM f_i(x_bar)
         + c * sum_i alpha_i weights_i (x_bar - center) + N_omega(x_bar)

alpha, beta >= 0, sum(alpha + beta) = 1 and beta_i = 0 whenever
f_i(x_bar) != f_i(center). c is 2*lam (the gradient of the prox term) or
lam under the paper-literal convention. The limiting subdifferential is
not convex, so one LP is solved per selection of convex pieces.

"""
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .dirlip import DLSchedule, certify_dl
from .exceptions import CapacityError, DomainError, NotDirectionallyLipschitzError, NotLipschitzError
from .functions import PiecewiseFunction, VectorFunction
from .logging_utils import logger
from .parallel import ordered_map
from .problems import ConstraintSet, Grid, RegularizedProblem, normal_cone, pareto_bruteforce, penalized_value
from .subdifferentials import limiting_boxes, lipschitz_verdict
from .type_constructors import Point
from .types_definitions import JSONDict, VectorLike

__all__ = [
    "CertificateOptions",
    "LipschitzResult",
    "MultiplierCertificate",
    "PenaltyReport",
    "lipschitz_at",
    "certify_pareto",
    "certify_front",
    "exact_penalty_check",
    "penalty_tau_from_dl",
]

ACTIVE_LEVEL_TOL = 1e-9
NORMALIZATION_TOL = 1e-12
COMPLEMENTARITY_TOL = 1e-10
NORMAL_CAP = 1e6
MAX_PIECES = 4
MAX_OBJECTIVES = 5
PENALTY_MARGIN = 1e-12
TAU_MARGIN = 1e-3


@dataclass(frozen=True)
class CertificateOptions:
    tol: float = 1e-6
    paper_literal: bool = False
    threads: int = 1

    def prox_factor(self, lam: float, literal: Optional[bool] = None) -> float:
        literal = self.paper_literal if literal is None else literal
        return lam if literal else 2.0 * lam


@dataclass(frozen=True)
class LipschitzResult:
    verdicts: Tuple[bool, ...]
    approximate: bool = False

    @property
    def all_lipschitz(self) -> bool:
        return all(self.verdicts)

    def to_dict(self) -> JSONDict:
        return {"verdicts": list(self.verdicts), "approximate": self.approximate}


def lipschitz_at(F: VectorFunction, xbar: VectorLike) -> LipschitzResult:
    """Per component: singular subdifferential at xbar equals {0}."""
    xbar = Point(xbar)
    logger.debug(f"lipschitz_at {xbar}")
    verdicts, approximate = [], False
    for f in F:
        ok, approx = lipschitz_verdict(f, xbar)
        verdicts.append(ok)
        approximate = approximate or approx
    return LipschitzResult(tuple(verdicts), approximate)


@dataclass(frozen=True)
class MultiplierCertificate:
    point: Tuple[float, ...]
    alpha: Tuple[float, ...]
    beta: Tuple[float, ...]
    subgradients: Tuple[Tuple[float, ...], ...]
    normal: Tuple[float, ...]
    normal_coefficients: Tuple[float, ...]
    stationarity: float
    normalization: float
    complementarity: float
    selection: Tuple[int, ...]
    convention: str
    alternate_residual: float
    tol: float
    approximate: bool = False
    candidates: int = field(default=0, compare=False)

    @property
    def tau(self) -> float:
        return float(np.linalg.norm(self.normal))

    @property
    def feasible(self) -> bool:
        return (
            self.stationarity <= self.tol
            and self.normalization <= NORMALIZATION_TOL
            and self.complementarity <= COMPLEMENTARITY_TOL
        )

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "no certificate found"

    def to_dict(self) -> JSONDict:
        return {
            "point": list(self.point),
            "verdict": self.verdict,
            "alpha": list(self.alpha),
            "beta": list(self.beta),
            "subgradients": [list(u) for u in self.subgradients],
            "normal": list(self.normal),
            "normal_coefficients": list(self.normal_coefficients),
            "tau": self.tau,
            "residuals": {
                "stationarity": self.stationarity,
                "normalization": self.normalization,
                "complementarity": self.complementarity,
            },
            "selection": list(self.selection),
            "convention": self.convention,
            "alternate_residual": self.alternate_residual,
            "tol": self.tol,
            "approximate": self.approximate,
        }


@dataclass(frozen=True)
class _Selection:
    index: int
    pieces: Tuple[int, ...]
    lo: np.ndarray
    hi: np.ndarray


def _solve_selection(sel: _Selection, prox: np.ndarray, generators: np.ndarray,
                     beta_free: np.ndarray, minimize_beta: bool = True):
    """
    LP in (alpha, beta, w, mu, s): minimize s with |r|_inf <= s, then
    minimize sum(beta) at that s. Returns (alpha, beta, w, mu) or None.

    """
    m, n = sel.lo.shape
    k = len(generators)
    nv = 2 * m + m * n + k + 1
    w_start, mu_start = 2 * m, 2 * m + m * n
    i_s = nv - 1

    rows, rhs = [], []
    for i in range(m):
        for d in range(n):
            upper = np.zeros(nv)
            upper[w_start + i * n + d] = 1.0
            upper[i] = upper[m + i] = -sel.hi[i, d]
            lower = np.zeros(nv)
            lower[w_start + i * n + d] = -1.0
            lower[i] = lower[m + i] = sel.lo[i, d]
            rows += [upper, lower]
            rhs += [0.0, 0.0]
    for d in range(n):
        r = np.zeros(nv)
        for i in range(m):
            r[w_start + i * n + d] = 1.0
            r[i] = prox[i, d]
        for j in range(k):
            r[mu_start + j] = generators[j, d]
        plus, minus = r.copy(), -r
        plus[i_s] = minus[i_s] = -1.0
        rows += [plus, minus]
        rhs += [0.0, 0.0]
    A_ub, b_ub = np.array(rows), np.array(rhs)
    A_eq = np.zeros((1, nv))
    A_eq[0, : 2 * m] = 1.0
    b_eq = np.array([1.0])

    caps = [NORMAL_CAP / max(np.linalg.norm(g), 1e-300) for g in generators]
    bounds = (
        [(0, None)] * m
        + [(0, None) if free else (0, 0) for free in beta_free]
        + [(None, None)] * (m * n)
        + [(0, cap) for cap in caps]
        + [(0, None)]
    )
    c = np.zeros(nv)
    c[i_s] = 1.0
    first = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if first.status != 0:
        return None
    solution = first.x
    if minimize_beta and beta_free.any():
        bounds[i_s] = (0, first.x[i_s] + 1e-12)
        c = np.zeros(nv)
        c[m: 2 * m] = 1.0
        second = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if second.status == 0:
            solution = second.x
    alpha = np.maximum(solution[:m], 0.0)
    beta = np.maximum(solution[m: 2 * m], 0.0)
    w = solution[2 * m: 2 * m + m * n].reshape(m, n)
    mu = np.maximum(solution[2 * m + m * n: nv - 1], 0.0)
    return alpha, beta, w, mu


def _residual(sel: _Selection, prox: np.ndarray, generators: np.ndarray, alpha, beta, w, mu):
    """Recompute the inclusion defect without trusting the LP."""
    m, n = sel.lo.shape
    weights = alpha + beta
    subgradients = np.zeros((m, n))
    for i in range(m):
        if weights[i] > 1e-15:
            subgradients[i] = np.clip(w[i] / weights[i], sel.lo[i], sel.hi[i])
        else:
            subgradients[i] = np.clip(0.0, sel.lo[i], sel.hi[i])
    normal = generators.T @ mu if len(generators) else np.zeros(n)
    r = (weights[:, None] * subgradients).sum(axis=0) + (alpha[:, None] * prox).sum(axis=0) + normal
    return float(np.linalg.norm(r)), subgradients, normal


def certify_pareto(
    rp: RegularizedProblem, xbar: VectorLike, options: Optional[CertificateOptions] = None
) -> MultiplierCertificate:
    """
    Search multipliers for the necessary conditions at xbar and return the
    certificate with the smallest recomputed stationarity residual (ties by
    selection index).

    """
    options = options or CertificateOptions()
    xbar = Point(xbar)
    logger.debug(f"certify_pareto at {xbar} tol={options.tol} paper_literal={options.paper_literal}")
    if not rp.in_level_set(xbar):
        raise DomainError(f"{xbar} is not in the level set of the regularized problem")
    m, n = len(rp.F), rp.dimension
    if m > MAX_OBJECTIVES:
        raise CapacityError(f"certificate search supports up to {MAX_OBJECTIVES} objectives")

    lipschitz = lipschitz_at(rp.F, xbar)
    if not lipschitz.all_lipschitz:
        bad = [i for i, ok in enumerate(lipschitz.verdicts) if not ok]
        raise NotLipschitzError(
            f"objectives {bad} are not locally Lipschitzian at {xbar}; conditions through "
            f"normals to epigraphs are not covered",
            {"components": bad, "verdicts": list(lipschitz.verdicts)},
        )

    boxes, approximate = [], lipschitz.approximate
    for f in rp.F:
        pieces, approx = limiting_boxes(f, xbar)
        if len(pieces) > MAX_PIECES:
            raise CapacityError(f"limiting subdifferential of {f} has {len(pieces)} convex pieces")
        boxes.append(pieces)
        approximate = approximate or approx

    center = rp.center_point
    weights = np.asarray(rp.weights)
    literal_names = {False: "analytic", True: "paper-literal"}
    gaps = np.abs(rp.F(xbar) - rp.center_values)
    beta_free = gaps <= ACTIVE_LEVEL_TOL
    generators = normal_cone(rp.omega, xbar).matrix()

    selections = []
    for index, combo in enumerate(itertools.product(*(range(len(b)) for b in boxes))):
        lo = np.array([boxes[i][p][0] for i, p in enumerate(combo)])
        hi = np.array([boxes[i][p][1] for i, p in enumerate(combo)])
        selections.append(_Selection(index, tuple(combo), lo, hi))

    def evaluate_convention(literal: bool):
        factor = options.prox_factor(rp.lam, literal)
        prox = factor * weights[:, None] * (xbar - center)[None, :]

        def run(sel: _Selection):
            solved = _solve_selection(sel, prox, generators, beta_free)
            if solved is None:
                return math.inf, sel, None
            alpha, beta, w, mu = solved
            residual, subgradients, normal = _residual(sel, prox, generators, alpha, beta, w, mu)
            return residual, sel, (alpha, beta, subgradients, normal, mu)

        results = ordered_map(run, selections, options.threads)
        return min(results, key=lambda r: (r[0], r[1].index))

    residual, sel, payload = evaluate_convention(options.paper_literal)
    alternate, _, _ = evaluate_convention(not options.paper_literal)
    if payload is None:
        alpha = beta = np.zeros(m)
        subgradients, normal, mu = np.zeros((m, n)), np.zeros(n), np.zeros(len(generators))
    else:
        alpha, beta, subgradients, normal, mu = payload
    if abs(residual - alternate) > options.tol:
        logger.info(
            f"prox-term conventions disagree at {xbar}: {literal_names[options.paper_literal]} "
            f"residual {residual:.3g}, other {alternate:.3g}"
        )
    gaps_f = rp.F(xbar) - rp.center_values
    return MultiplierCertificate(
        point=tuple(xbar),
        alpha=tuple(float(a) for a in alpha),
        beta=tuple(float(b) for b in beta),
        subgradients=tuple(tuple(float(c) for c in u) for u in subgradients),
        normal=tuple(float(c) for c in normal),
        normal_coefficients=tuple(float(c) for c in mu),
        stationarity=residual,
        normalization=abs(float(np.sum(alpha) + np.sum(beta)) - 1.0),
        complementarity=float(np.max(np.abs(beta * gaps_f))) if m else 0.0,
        selection=sel.pieces,
        convention=literal_names[options.paper_literal],
        alternate_residual=alternate,
        tol=options.tol,
        approximate=approximate,
        candidates=len(selections),
    )


def certify_front(
    rp: RegularizedProblem, grid: Grid, options: Optional[CertificateOptions] = None
) -> List[MultiplierCertificate]:
    """
    Certificates at every Pareto lattice point of (Psi, D) where all
    objectives are locally Lipschitzian. Points failing the Lipschitz test
    are skipped. The residuals shrink with the grid step, since lattice
    points only approximate the true front.

    """
    options = options or CertificateOptions()
    front = pareto_bruteforce(rp, grid, options.threads)
    logger.debug(f"certify_front over {len(front)} lattice points, step {grid.step}")
    certificates = []
    for x in front.points:
        if not lipschitz_at(rp.F, x).all_lipschitz:
            logger.info(f"certify_front skips {x.tolist()}: not locally Lipschitzian")
            continue
        certificates.append(certify_pareto(rp, x, options))
    return certificates


@dataclass(frozen=True)
class PenaltyReport:
    tau: float
    radius: float
    step: float
    violating_point: Optional[Tuple[float, ...]]
    violation: float
    scanned: int

    @property
    def passed(self) -> bool:
        return self.violating_point is None

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> JSONDict:
        return {
            "tau": self.tau,
            "radius": self.radius,
            "step": self.step,
            "verdict": self.verdict,
            "violating_point": None if self.violating_point is None else list(self.violating_point),
            "violation": self.violation,
            "scanned": self.scanned,
        }


def _radial_points(xbar: np.ndarray, radius: float, depth: int = 41, seed: int = 0) -> np.ndarray:
    n = len(xbar)
    axes = np.vstack([np.eye(n), -np.eye(n)])
    if n > 1:
        rng = np.random.default_rng(seed)
        extra = rng.normal(size=(16 * n, n))
        axes = np.vstack([axes, extra / np.linalg.norm(extra, axis=1, keepdims=True)])
    radii = radius * 10.0 ** (-np.arange(depth) / 4.0)
    return (xbar[None, None, :] + radii[None, :, None] * axes[:, None, :]).reshape(-1, n)


def exact_penalty_check(
    f: PiecewiseFunction,
    omega: ConstraintSet,
    xbar: VectorLike,
    tau: float,
    radius: float = 0.5,
    step: float = 1e-4,
) -> PenaltyReport:
    """
    Look for x near xbar with f(x) + tau*d_omega(x) < f(xbar) - 1e-12 on a
    lattice of the ball plus points geometrically approaching xbar along
    fixed rays.

    """
    xbar = Point(xbar)
    logger.debug(f"exact_penalty_check at {xbar} tau={tau} radius={radius} step={step}")
    if not omega.contains(xbar):
        raise DomainError(f"{xbar} lies outside the constraint set")
    f0 = f(xbar)
    lattice = Grid.around(xbar, radius, step).points()
    lattice = lattice[np.linalg.norm(lattice - xbar, axis=1) <= radius]
    X = np.vstack([lattice, _radial_points(xbar, radius)])
    values = penalized_value(f, omega, tau, X)
    gaps = values - f0
    k = int(np.argmin(gaps))
    if gaps[k] < -PENALTY_MARGIN:
        logger.info(f"penalized function drops below f(xbar) at {X[k]} for tau={tau}")
        return PenaltyReport(tau, radius, step, tuple(X[k]), float(-gaps[k]), len(X))
    return PenaltyReport(tau, radius, step, None, 0.0, len(X))


def penalty_tau_from_dl(
    f: PiecewiseFunction,
    omega: ConstraintSet,
    xbar: VectorLike,
    schedule: Optional[DLSchedule] = None,
    directions: Optional[Sequence[VectorLike]] = None,
) -> float:
    """
    Penalty threshold from the directional Lipschitz certification: the
    largest constant over all certified directions plus a 1e-3 margin.

    This is not the witness's own constant L(xbar, u). The witness is picked
    for interiority, and a smaller constant along it would not cover the
    other certified directions.

    """
    xbar = Point(xbar)
    logger.debug(f"penalty_tau_from_dl at {xbar}")
    if not omega.contains(xbar):
        raise DomainError(f"{xbar} lies outside the constraint set")
    report = certify_dl(f, xbar, schedule, directions)
    if not report.is_dl:
        raise NotDirectionallyLipschitzError(
            f"{f} is not certified directionally Lipschitzian at {xbar}: {report.verdict}", report
        )
    constants: List[float] = [c.constant for c in report.certified]
    return max(max(constants), 0.0) + TAU_MARGIN
