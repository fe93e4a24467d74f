"""
Numeric certification of the directional Lipschitz property.

f is directionally Lipschitzian at x_bar when for some unit vector u

    limsup  (f(x + t*v) - f(x)) / t  <  inf
    x -> x_bar (f-attentively), v -> u, t -> 0+

The analyzer samples this triple limit on a shrinking schedule, one
maximal quotient Q_j per level, and classifies the growth of Q_j.

"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DataError, DomainError
from .functions import PiecewiseFunction, combine, evaluate
from .logging_utils import logger
from .parallel import ordered_map
from .sampling import BLOW_UP_R2, BLOW_UP_SLOPE, geometric_levels, loglog_fit, step_band
from .type_constructors import Point
from .types_definitions import JSONDict, Vector, VectorLike

__all__ = [
    "DLSchedule",
    "DirectionResult",
    "DirLipReport",
    "DLCalculusResult",
    "candidate_directions",
    "quotient_limsup",
    "analyze_direction",
    "certify_dl",
    "dl_calculus_check",
]

DL = "DL"
NOT_DL = "not-DL"
INCONCLUSIVE = "inconclusive"

UNIT_TOL = 1e-12
AGREEMENT = 0.1
CALCULUS_MARGIN = 1e-3


@dataclass(frozen=True)
class DLSchedule:
    """
    Level j uses steps t in (0, t_j], points within delta_j = sqrt(t_j) of
    x_bar and directions within rho_j = 0.1*sqrt(t_j) of u on the sphere.

    """

    levels: Tuple[float, ...] = geometric_levels(6)
    samples: int = 64
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        levels = tuple(float(t) for t in self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) < 2:
            raise DataError("a schedule needs at least two levels")
        if any(t <= 0 for t in levels) or any(b >= a for a, b in zip(levels, levels[1:])):
            raise DataError(f"levels must be positive and strictly decreasing, got {levels}")
        if self.samples < 1:
            raise DataError("samples per level must be at least 1")

    def point_radius(self, j: int) -> float:
        return math.sqrt(self.levels[j])

    def direction_radius(self, j: int) -> float:
        return 0.1 * math.sqrt(self.levels[j])

    @property
    def finest_radius(self) -> float:
        return self.point_radius(len(self.levels) - 1)


def _unit(u: VectorLike, dimension: int) -> Vector:
    u = Point(u)
    if len(u) != dimension:
        raise DataError(f"direction of dimension {len(u)} for a function on R^{dimension}")
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise DataError(f"direction {u} is not a unit vector")
    return u


def _perturbed_directions(u: Vector, rho: float, draws: np.ndarray) -> np.ndarray:
    """Unit vectors within angle ~rho of u, from direction-independent draws."""
    if len(u) == 1:
        return np.repeat(u[None, :], len(draws), axis=0)
    tangent = draws - np.outer(draws @ u, u)
    norms = np.linalg.norm(tangent, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    angles = rho * np.abs(draws[:, :1]) / (1.0 + np.abs(draws[:, :1]))
    v = np.cos(angles) * u + np.sin(angles) * tangent / norms
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def quotient_limsup(
    f: PiecewiseFunction, xbar: VectorLike, u: VectorLike, schedule: Optional[DLSchedule] = None
) -> np.ndarray:
    """
    Per-level maxima Q_j of (f(x + t*v) - f(x)) / t.

    Random draws depend only on (seed, level, dimension), so every
    direction and every function sees the same samples. Besides the random
    points, x runs through the anchors x_bar, x_bar - t*v and x_bar - t*v/2.

    """
    schedule = schedule or DLSchedule()
    n = f.dimension
    xbar = Point(xbar)
    u = _unit(u, n)
    f0 = evaluate(f, xbar)
    if not math.isfinite(f0):
        raise DomainError(f"{xbar} lies outside the domain of {f}")

    maxima = []
    for j, t in enumerate(schedule.levels):
        rng = np.random.default_rng([schedule.seed, j, n])
        offsets = rng.normal(size=(schedule.samples, n))
        offsets *= (rng.random((schedule.samples, 1)) ** (1.0 / n)) / np.linalg.norm(
            offsets, axis=1, keepdims=True
        )
        draws = rng.normal(size=(schedule.samples, n))
        v = np.vstack([u[None, :], _perturbed_directions(u, schedule.direction_radius(j), draws)])
        v = v[: schedule.samples]
        steps = step_band(t)

        xs, vs, ts = [], [], []
        for step in steps:
            points = np.vstack([
                xbar + schedule.point_radius(j) * offsets,
                np.repeat(xbar[None, :], len(v), axis=0),
                xbar - step * v,
                xbar - step * v / 2.0,
            ])
            directions = np.vstack([v, v, v, v])
            xs.append(points)
            vs.append(directions)
            ts.append(np.full(len(points), step))
        X, V, T = np.vstack(xs), np.vstack(vs), np.concatenate(ts)

        base = f.evaluate_many(X)
        keep = np.isfinite(base)
        if not f.continuous:
            keep &= np.abs(base - f0) <= t ** (1.0 / 3.0)
        if not keep.any():
            maxima.append(-math.inf)
            continue
        moved = f.evaluate_many(X[keep] + T[keep, None] * V[keep])
        maxima.append(float(np.max((moved - base[keep]) / T[keep])))
    return np.asarray(maxima)


@dataclass(frozen=True)
class DirectionResult:
    direction: Tuple[float, ...]
    quotients: Tuple[float, ...]
    slope: float
    r2: float
    verdict: str
    constant: Optional[float]

    def to_dict(self) -> JSONDict:
        return {
            "direction": list(self.direction),
            "quotients": [q if math.isfinite(q) else str(q) for q in self.quotients],
            "slope": self.slope,
            "r2": self.r2,
            "verdict": self.verdict,
            "constant": self.constant,
        }


def _classify(levels: Sequence[float], quotients: np.ndarray) -> Tuple[str, Optional[float], float, float]:
    positive = np.maximum(quotients, 0.0)
    slope, r2 = loglog_fit(levels, quotients)
    q_prev, q_last = positive[-2], positive[-1]
    if math.isfinite(q_prev) and math.isfinite(q_last):
        scale = max(abs(q_prev), abs(q_last), 1.0)
        if abs(q_last - q_prev) <= AGREEMENT * scale:
            return DL, float(max(q_prev, q_last)), slope, r2
    if slope <= BLOW_UP_SLOPE and r2 >= BLOW_UP_R2:
        return NOT_DL, None, slope, r2
    if np.isinf(quotients[-2:]).all() and (quotients[-2:] > 0).all():
        return NOT_DL, None, -math.inf, 1.0
    return INCONCLUSIVE, None, slope, r2


def analyze_direction(
    f: PiecewiseFunction, xbar: VectorLike, u: VectorLike, schedule: Optional[DLSchedule] = None
) -> DirectionResult:
    schedule = schedule or DLSchedule()
    quotients = quotient_limsup(f, xbar, u, schedule)
    verdict, constant, slope, r2 = _classify(schedule.levels, quotients)
    return DirectionResult(
        tuple(float(c) for c in Point(u)), tuple(float(q) for q in quotients), slope, r2, verdict, constant
    )


def candidate_directions(dimension: int) -> np.ndarray:
    """
    A uniform spread of 64*n unit vectors plus the signed coordinate axes
    (n = 1: just +1 and -1). Larger dimensions need explicit directions.

    """
    if dimension == 1:
        return np.array([[1.0], [-1.0]])
    if dimension == 2:
        angles = 2.0 * math.pi * np.arange(128) / 128.0
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if dimension == 3:
        count = 192
        k = np.arange(count) + 0.5
        z = 1.0 - 2.0 * k / count
        radius = np.sqrt(1.0 - z * z)
        phi = math.pi * (3.0 - math.sqrt(5.0)) * k
        sphere = np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])
        axes = np.vstack([np.eye(3), -np.eye(3)])
        return np.vstack([sphere, axes])
    raise DataError(f"direction search covers n <= 3; pass candidate directions for n = {dimension}")


@dataclass(frozen=True)
class DirLipReport:
    point: Tuple[float, ...]
    direction: Optional[Tuple[float, ...]]
    levels: Tuple[float, ...]
    quotients: Tuple[float, ...]
    slope: float
    r2: float
    verdict: str
    constant: Optional[float]
    radius: Optional[float]
    certified: Tuple[DirectionResult, ...] = field(default=())
    tested: int = 0

    @property
    def is_dl(self) -> bool:
        return self.verdict == DL

    def table(self) -> List[JSONDict]:
        """Quotient-versus-step rows of the reported direction."""
        return [
            {"level": j + 1, "t": t, "Q": q if math.isfinite(q) else str(q)}
            for j, (t, q) in enumerate(zip(self.levels, self.quotients))
        ]

    def to_dict(self) -> JSONDict:
        return {
            "point": list(self.point),
            "direction": None if self.direction is None else list(self.direction),
            "verdict": self.verdict,
            "constant": self.constant,
            "radius": self.radius,
            "slope": self.slope,
            "r2": self.r2,
            "tested": self.tested,
            "table": self.table(),
            "certified": [
                {"direction": list(c.direction), "constant": c.constant} for c in self.certified
            ],
        }


def _interiority(candidate: np.ndarray, others: np.ndarray) -> float:
    if len(others) == 0:
        return math.inf
    cosines = np.clip(others @ candidate, -1.0, 1.0)
    return float(np.arccos(cosines.max()))


def certify_dl(
    f: PiecewiseFunction,
    xbar: VectorLike,
    schedule: Optional[DLSchedule] = None,
    directions: Optional[Sequence[VectorLike]] = None,
) -> DirLipReport:
    """
    Run the direction search and classify.

    The verdict is DL when some direction certifies, not-DL when every
    direction blows up and inconclusive otherwise. The witness is the
    certified direction deepest inside the certified region, then the one
    with the smallest constant.

    """
    schedule = schedule or DLSchedule()
    xbar = Point(xbar)
    logger.debug(f"certify_dl {f} at {xbar}")
    if directions is None:
        candidates = candidate_directions(f.dimension)
    else:
        candidates = np.array([_unit(d, f.dimension) for d in directions])

    results = ordered_map(
        lambda u: analyze_direction(f, xbar, u, schedule), list(candidates), schedule.threads
    )
    certified = [(k, r) for k, r in enumerate(results) if r.verdict == DL]
    levels = schedule.levels

    if certified:
        others = np.array([candidates[k] for k, r in enumerate(results) if r.verdict != DL])
        others = others.reshape(-1, f.dimension)
        ranked = sorted(
            certified,
            key=lambda kr: (
                -_interiority(candidates[kr[0]], others),
                kr[1].constant,
                kr[1].quotients[-1],
                kr[0],
            ),
        )
        best = ranked[0][1]
        return DirLipReport(
            tuple(xbar), best.direction, levels, best.quotients, best.slope, best.r2,
            DL, best.constant, schedule.finest_radius, tuple(r for _, r in certified), len(results),
        )

    if all(r.verdict == NOT_DL for r in results):
        mildest = max(results, key=lambda r: r.slope)
        logger.info(f"{f} is not directionally Lipschitzian at {xbar}: slope {mildest.slope:.3f}")
        return DirLipReport(
            tuple(xbar), mildest.direction, levels, mildest.quotients, mildest.slope,
            mildest.r2, NOT_DL, None, None, (), len(results),
        )

    undecided = next(r for r in results if r.verdict == INCONCLUSIVE)
    return DirLipReport(
        tuple(xbar), undecided.direction, levels, undecided.quotients, undecided.slope,
        undecided.r2, INCONCLUSIVE, None, None, (), len(results),
    )


@dataclass(frozen=True)
class DLCalculusResult:
    status: str
    kind: str
    constants: Tuple[Optional[float], ...]
    bound: Optional[float]
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> JSONDict:
        return {
            "status": self.status,
            "kind": self.kind,
            "constants": list(self.constants),
            "bound": self.bound,
            "message": self.message,
        }


def dl_calculus_check(
    kind: str,
    f: PiecewiseFunction,
    g: PiecewiseFunction,
    xbar: VectorLike,
    u: VectorLike,
    schedule: Optional[DLSchedule] = None,
) -> DLCalculusResult:
    """
    Sum and max preserve the directional Lipschitz property with a common
    direction: L(f+g) <= L(f) + L(g), L(max) <= max(L(f), L(g)).
    Status is "pass", "fail" or "precondition" (f or g not certified at u).

    """
    if kind not in ("sum", "max"):
        raise DataError(f"unknown combination {kind!r}")
    schedule = schedule or DLSchedule()
    logger.debug(f"dl_calculus_check {kind} of {f}, {g} at {xbar} along {u}")
    rf = analyze_direction(f, xbar, u, schedule)
    rg = analyze_direction(g, xbar, u, schedule)
    if rf.verdict != DL or rg.verdict != DL:
        return DLCalculusResult(
            "precondition", kind, (rf.constant, rg.constant), None,
            f"members not certified along the direction: {rf.verdict}, {rg.verdict}",
        )
    combined = combine(kind, [f, g])
    rc = analyze_direction(combined, xbar, u, schedule)
    if kind == "sum":
        bound = rf.constant + rg.constant + CALCULUS_MARGIN
    else:
        bound = max(rf.constant, rg.constant) + CALCULUS_MARGIN
    constants = (rf.constant, rg.constant, rc.constant)
    if rc.verdict != DL:
        return DLCalculusResult("fail", kind, constants, bound, f"combination verdict {rc.verdict}")
    if rc.constant > bound:
        return DLCalculusResult("fail", kind, constants, bound, f"constant {rc.constant} above {bound}")
    return DLCalculusResult("pass", kind, constants, bound)
