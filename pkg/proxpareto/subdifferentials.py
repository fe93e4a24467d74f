"""
Exact regular, limiting, singular and Clarke subdifferentials of 1-D
piecewise functions, with sampling-based cross-checks.

Everything is read off the one-sided behaviour of f around the point:
for each side we expand the governing piece's body (see `series`) and
collect the side's limit value, its Dini slope, the limits of the piece
derivative and any oscillation. Separable n-D bodies reduce to products
of 1-D sets; smooth n-D bodies use their exact gradient.

"""
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import BlowUpError, DataError, DomainError, NotLipschitzError, UnsupportedAtomError
from .functions import PiecewiseFunction, evaluate, gradient, separable_parts
from .logging_utils import logger
from .realsets import RealSet1D, minkowski_sum_all
from .sampling import geometric_levels, is_blow_up, step_band
from .type_constructors import Point
from .types_definitions import JSONDict, Side, VectorLike

__all__ = [
    "SideData",
    "SubdiffReport",
    "ProbeSchedule",
    "SumRuleResult",
    "RobustnessResult",
    "frechet_subdiff",
    "limiting_subdiff",
    "singular_subdiff",
    "clarke",
    "clarke_dirderiv",
    "sum_rule",
    "robustness_check",
    "numeric_frechet_probe",
    "subdiff_report",
    "limiting_boxes",
    "lipschitz_verdict",
]

JUMP_TOL = 1e-12
NUMERIC_JUMP_TOL = 1e-6
ROBUSTNESS_TOL = 1e-9

Box = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class SideData:
    """What f does on one side of the point."""

    side: Side
    present: bool
    attentive: bool = False
    jump: float = 0.0
    slope: float = math.nan
    oscillation_amp: float = 0.0
    derivative_limits: RealSet1D = field(default_factory=RealSet1D.empty)
    horizon: RealSet1D = field(default_factory=RealSet1D.zero)
    approximate: bool = False

    def to_dict(self) -> JSONDict:
        return {
            "side": self.side,
            "present": self.present,
            "attentive": self.attentive,
            "jump": self.jump,
            "slope": str(self.slope) if not math.isfinite(self.slope) else self.slope,
            "oscillation_amp": self.oscillation_amp,
            "derivative_limits": str(self.derivative_limits),
            "approximate": self.approximate,
        }


def _point_value(f: PiecewiseFunction, x: float) -> float:
    if f.dimension != 1:
        raise DataError(f"exact calculus needs a 1-D function, {f} lives on R^{f.dimension}")
    value = evaluate(f, x)
    if not math.isfinite(value):
        raise DomainError(f"{x} lies outside the domain of {f}")
    return value


def _exact_side(f: PiecewiseFunction, x: float, f0: float, side: Side) -> SideData:
    series = f.expand(x, side)
    if series.outside:
        return SideData(side, present=False)
    jump = series.value - f0
    if abs(jump) > JUMP_TOL * max(1.0, abs(f0)):
        return SideData(side, present=True, jump=jump)

    osc = series.oscillation
    lead = series.leading_below_one()
    if lead is not None:
        slope = math.copysign(math.inf, lead[1])
        limits = RealSet1D.empty()
        horizon = RealSet1D.ray(side * int(math.copysign(1, lead[1])))
    else:
        slope = series.dini_slope()
        limits = RealSet1D.point(side * slope)
        horizon = RealSet1D.zero()

    amp = 0.0
    if osc is not None:
        if osc.order == 1:
            amp = osc.value_amp
            limits, horizon = RealSet1D.whole(), RealSet1D.whole()
        elif lead is None:
            limits = RealSet1D.interval(side * slope - osc.slope_amp, side * slope + osc.slope_amp)
    return SideData(side, True, True, jump, slope, amp, limits, horizon)


def _numeric_side(f: PiecewiseFunction, x: float, f0: float, side: Side) -> SideData:
    hs = 10.0 ** -np.arange(2, 9, dtype=float)
    ys = x + side * hs
    values = f.evaluate_many(ys[:, None])
    if not np.all(np.isfinite(values[-3:])):
        return SideData(side, present=False, approximate=True)
    jump = float(values[-1] - f0)
    if abs(jump) > NUMERIC_JUMP_TOL * max(1.0, abs(f0)):
        return SideData(side, present=True, jump=jump, approximate=True)
    quotients = (values - f0) / hs
    if is_blow_up(hs, np.abs(quotients)):
        sign = 1 if quotients[-1] > 0 else -1
        return SideData(
            side, True, True, jump, math.copysign(math.inf, sign), 0.0,
            RealSet1D.empty(), RealSet1D.ray(side * sign), approximate=True,
        )
    delta = hs[-1] * 1e-3
    y = ys[-1]
    pair = f.evaluate_many(np.array([[y + delta], [y - delta]]))
    derivative = float(pair[0] - pair[1]) / (2.0 * delta)
    return SideData(
        side, True, True, jump, float(quotients[-1]), 0.0,
        RealSet1D.point(derivative), RealSet1D.zero(), approximate=True,
    )


def _sides(f: PiecewiseFunction, x: float, fallback: bool = True) -> Tuple[float, List[SideData]]:
    f0 = _point_value(f, x)
    out = []
    for side in (-1, 1):
        try:
            out.append(_exact_side(f, x, f0, side))
        except UnsupportedAtomError as exc:
            if not fallback:
                raise
            logger.warning(f"exact calculus failed for {f} at {x} side {side}: {exc}; using samples")
            out.append(_numeric_side(f, x, f0, side))
    return f0, out


def _frechet_from_sides(sides: Sequence[SideData]) -> RealSet1D:
    approximate = any(s.approximate for s in sides)
    lo, hi = -math.inf, math.inf
    for s in sides:
        if not s.present:
            continue
        if not s.attentive:
            if s.jump < 0:
                return RealSet1D(approximate=approximate)
            continue
        bound = s.slope - s.oscillation_amp
        if bound == math.inf:
            continue
        if bound == -math.inf:
            return RealSet1D(approximate=approximate)
        if s.side > 0:
            hi = min(hi, bound)
        else:
            lo = max(lo, -bound)
    if lo > hi:
        return RealSet1D(approximate=approximate)
    return RealSet1D(intervals=((lo, hi),), approximate=approximate)


def _limiting_from_sides(sides: Sequence[SideData]) -> RealSet1D:
    out = _frechet_from_sides(sides)
    for s in sides:
        if s.present and s.attentive:
            out = out | s.derivative_limits
    return out


def _singular_from_sides(sides: Sequence[SideData]) -> RealSet1D:
    frechet = _frechet_from_sides(sides)
    out = RealSet1D(points=(0.0,), approximate=frechet.approximate)
    if not frechet.is_empty:
        out = out | frechet.recession_cone()
    for s in sides:
        if s.present and s.attentive:
            out = out | s.horizon
    return out


def frechet_subdiff(f: PiecewiseFunction, x: float) -> RealSet1D:
    """
    Regular subdifferential at x: every v with s*v <= (Dini slope on side s)
    on both sides, a side going down by a jump making the set empty.

    """
    logger.debug(f"frechet_subdiff {f} at {x}")
    try:
        _, sides = _sides(f, x, fallback=False)
    except UnsupportedAtomError as exc:
        logger.warning(f"regular subdifferential of {f} at {x} falls back to probing: {exc}")
        return numeric_frechet_probe(f, x)
    return _frechet_from_sides(sides)


def limiting_subdiff(f: PiecewiseFunction, x: float) -> RealSet1D:
    logger.debug(f"limiting_subdiff {f} at {x}")
    _, sides = _sides(f, x)
    return _limiting_from_sides(sides)


def singular_subdiff(f: PiecewiseFunction, x: float) -> RealSet1D:
    logger.debug(f"singular_subdiff {f} at {x}")
    _, sides = _sides(f, x)
    return _singular_from_sides(sides)


def clarke(f: PiecewiseFunction, x: float) -> RealSet1D:
    """Convex hull of the limiting set at a locally Lipschitzian point."""
    logger.debug(f"clarke {f} at {x}")
    _, sides = _sides(f, x)
    singular = _singular_from_sides(sides)
    if not singular.is_zero:
        raise NotLipschitzError(f"{f} is not locally Lipschitzian at {x}: singular set {singular}", singular)
    return _limiting_from_sides(sides).convex_hull()


@dataclass(frozen=True)
class SubdiffReport:
    function: str
    point: float
    value: float
    frechet: RealSet1D
    limiting: RealSet1D
    singular: RealSet1D
    clarke: Optional[RealSet1D]
    sides: Tuple[SideData, ...]

    @property
    def lipschitz(self) -> bool:
        return self.singular.is_zero

    @property
    def approximate(self) -> bool:
        return any(s.approximate for s in self.sides)

    def to_dict(self) -> JSONDict:
        return {
            "function": self.function,
            "point": self.point,
            "value": self.value,
            "frechet": self.frechet.to_dict(),
            "limiting": self.limiting.to_dict(),
            "singular": self.singular.to_dict(),
            "clarke": None if self.clarke is None else self.clarke.to_dict(),
            "lipschitz": self.lipschitz,
            "approximate": self.approximate,
            "sides": [s.to_dict() for s in self.sides],
        }


def subdiff_report(f: PiecewiseFunction, x: float) -> SubdiffReport:
    logger.debug(f"subdiff_report {f} at {x}")
    f0, sides = _sides(f, x)
    singular = _singular_from_sides(sides)
    limiting = _limiting_from_sides(sides)
    return SubdiffReport(
        function=str(f),
        point=float(x),
        value=f0,
        frechet=_frechet_from_sides(sides),
        limiting=limiting,
        singular=singular,
        clarke=limiting.convex_hull() if singular.is_zero else None,
        sides=tuple(sides),
    )


def clarke_dirderiv(f: PiecewiseFunction, x: float, d: float, levels: int = 6) -> float:
    """
    limsup of (f(y + t*d) - f(y)) / t over y -> x, t -> 0.

    At a Lipschitz point with exact one-sided expansions this is the
    support value max{v*d : v in clarke(f, x)}. Otherwise it is sampled:
    at level j the steps lie in (0, t_j] and y runs over a 41-point grid of
    radius sqrt(t_j) plus the anchors x - t*d and x - t*d/2. The two finest
    levels are extrapolated linearly in the radius when the maxima shrink.

    """
    logger.debug(f"clarke_dirderiv {f} at {x} direction {d}")
    _point_value(f, x)
    if d == 0:
        return 0.0
    try:
        _, sides = _sides(f, x, fallback=False)
    except UnsupportedAtomError:
        sides = None
    if sides is not None and _singular_from_sides(sides).is_zero:
        hull = _limiting_from_sides(sides).convex_hull()
        if not hull.is_empty:
            return float(d * (hull.supremum if d > 0 else hull.infimum))
    ts = geometric_levels(levels)
    radii, maxima = [], []
    for t in ts:
        r = math.sqrt(t)
        steps = step_band(t)
        ys = np.concatenate([x + r * np.linspace(-1.0, 1.0, 41), x - steps * d, x - steps * d / 2.0])
        Y = np.repeat(ys, len(steps))
        S = np.tile(steps, len(ys))
        base = f.evaluate_many(Y[:, None])
        moved = f.evaluate_many((Y + S * d)[:, None])
        keep = np.isfinite(base) & np.isfinite(moved)
        if not keep.any():
            raise DomainError(f"no sample of {f} near {x} stays in the domain")
        radii.append(r)
        maxima.append(float(np.max((moved[keep] - base[keep]) / S[keep])))
    if is_blow_up(ts, maxima):
        raise BlowUpError(f"difference quotients of {f} at {x} grow without bound")
    q_coarse, q_fine = maxima[-2], maxima[-1]
    if q_coarse > q_fine:
        r_coarse, r_fine = radii[-2], radii[-1]
        return q_fine - (q_coarse - q_fine) * r_fine / (r_coarse - r_fine)
    return q_fine


@dataclass(frozen=True)
class SumRuleResult:
    qualified: bool
    outer: RealSet1D
    limiting: Tuple[RealSet1D, ...]
    singular: Tuple[RealSet1D, ...]

    def to_dict(self) -> JSONDict:
        return {
            "qualified": self.qualified,
            "outer": self.outer.to_dict(),
            "limiting": [s.to_dict() for s in self.limiting],
            "singular": [s.to_dict() for s in self.singular],
        }


def _has_nontrivial_zero_sum(cones: Sequence[RealSet1D]) -> bool:
    # v_1 + ... + v_m = 0 has a nonzero solution iff one cone reaches
    # positive values and a different one reaches negative values
    positive = [i for i, c in enumerate(cones) if c.supremum > 0]
    negative = [i for i, c in enumerate(cones) if c.infimum < 0]
    return any(i != j for i in positive for j in negative)


def sum_rule(fs: Sequence[PiecewiseFunction], x: float) -> SumRuleResult:
    """
    Qualification verdict for the limiting sum rule and the Minkowski sum
    of the limiting sets (an outer estimate of the sum's limiting set when
    qualified).

    """
    logger.debug(f"sum_rule of {len(fs)} functions at {x}")
    if not fs:
        raise DataError("sum rule needs at least one function")
    limiting, singular = [], []
    for f in fs:
        _, sides = _sides(f, x)
        limiting.append(_limiting_from_sides(sides))
        singular.append(_singular_from_sides(sides))
    qualified = not _has_nontrivial_zero_sum(singular)
    return SumRuleResult(qualified, minkowski_sum_all(limiting), tuple(limiting), tuple(singular))


@dataclass(frozen=True)
class RobustnessResult:
    passed: bool
    trials: int
    convergent: int
    failures: Tuple[JSONDict, ...] = ()

    def to_dict(self) -> JSONDict:
        return {
            "passed": self.passed,
            "trials": self.trials,
            "convergent": self.convergent,
            "failures": list(self.failures),
        }


def robustness_check(
    f: PiecewiseFunction, x: float, trials: int = 20, seed: int = 0, depth: int = 12
) -> RobustnessResult:
    """
    Closedness of the limiting subdifferential under attentive convergence.

    Each trial walks x_k = x + s*u_k*10**-k from one side, follows the
    element of the limiting set at x_k nearest to the previous pick and,
    when those picks settle, checks that their limit lies in the limiting
    set at x. Trials whose picks do not settle pass vacuously.

    """
    logger.debug(f"robustness_check {f} at {x} trials={trials} seed={seed}")
    f0 = _point_value(f, x)
    target = limiting_subdiff(f, x)
    rng = np.random.default_rng(seed)
    convergent, failures = 0, []
    for trial in range(trials):
        side = 1 if rng.random() < 0.5 else -1
        scales = rng.uniform(0.5, 1.5, size=depth)
        picks: List[float] = []
        for k in range(1, depth + 1):
            h = scales[k - 1] * 10.0 ** -k
            xk = x + side * h
            fk = evaluate(f, xk)
            if not math.isfinite(fk) or abs(fk - f0) > h ** (1.0 / 3.0):
                continue
            try:
                here = limiting_subdiff(f, xk)
            except (UnsupportedAtomError, DomainError):
                continue
            pick = here.nearest(picks[-1] if picks else 0.0)
            if pick is not None:
                picks.append(pick)
        if len(picks) < 4:
            continue
        tail = np.asarray(picks[-4:])
        if np.ptp(tail) > 1e-6 * max(1.0, abs(tail[-1])):
            continue
        convergent += 1
        limit = float(tail[-1])
        if target.distance(limit) > ROBUSTNESS_TOL + float(np.abs(np.diff(tail)).max()):
            failures.append({"trial": trial, "side": side, "limit": limit})
    return RobustnessResult(not failures, trials, convergent, tuple(failures))


@dataclass(frozen=True)
class ProbeSchedule:
    levels: Tuple[float, ...] = geometric_levels(6)
    v_min: float = -10.0
    v_max: float = 10.0
    v_step: float = 0.01
    samples: int = 25

    def candidates(self) -> np.ndarray:
        count = int(round((self.v_max - self.v_min) / self.v_step)) + 1
        return np.round(np.linspace(self.v_min, self.v_max, count), 12)


def _runs_to_set(grid: np.ndarray, hits: np.ndarray) -> RealSet1D:
    pieces = []
    start = None
    for k, hit in enumerate(hits):
        if hit and start is None:
            start = k
        if (not hit or k == len(hits) - 1) and start is not None:
            end = k if hit else k - 1
            pieces.append((float(grid[start]), float(grid[end])))
            start = None
    return RealSet1D.from_pieces(pieces, approximate=True)


def numeric_frechet_probe(
    f: PiecewiseFunction, x: float, schedule: Optional[ProbeSchedule] = None
) -> RealSet1D:
    """
    Grid of candidate slopes v passing the regular-subgradient inequality
    (f(y) - f(x) - v*(y - x)) / |y - x| >= 0 at every sample of the finest
    level, with y log-spaced in [r*1e-3, r] on both sides, r = sqrt(t_J).

    """
    schedule = schedule or ProbeSchedule()
    logger.debug(f"numeric_frechet_probe {f} at {x}")
    f0 = _point_value(f, x)
    r = math.sqrt(schedule.levels[-1])
    hs = np.logspace(math.log10(r) - 3.0, math.log10(r), schedule.samples)
    candidates = schedule.candidates()
    passing = np.ones(len(candidates), dtype=bool)
    for side in (-1, 1):
        values = f.evaluate_many((x + side * hs)[:, None])
        with np.errstate(invalid="ignore"):
            quotients = (values - f0) / hs
        finite = quotients[np.isfinite(quotients)]
        if finite.size == 0:
            continue
        # s*v <= every quotient
        passing &= side * candidates <= finite.min()
    return _runs_to_set(candidates, passing)


# n-D reductions used by the certifier


def _separable_or_none(f: PiecewiseFunction) -> Optional[List[PiecewiseFunction]]:
    return None if f.dimension == 1 else separable_parts(f)


def _numeric_gradient(f: PiecewiseFunction, x: np.ndarray) -> np.ndarray:
    n = len(x)
    h = 1e-7 * max(1.0, float(np.abs(x).max()))
    E = np.eye(n) * h
    plus = f.evaluate_many(x + E)
    minus = f.evaluate_many(x - E)
    return (plus - minus) / (2.0 * h)


def limiting_boxes(f: PiecewiseFunction, x: VectorLike) -> Tuple[List[Box], bool]:
    """
    Convex pieces of the limiting subdifferential at x as boxes [lo, hi],
    plus an approximate flag. 1-D sets give one box per interval or point,
    separable bodies give Cartesian products, smooth bodies a singleton.

    """
    x = Point(x)
    if f.dimension == 1:
        L = limiting_subdiff(f, float(x[0]))
        return [(np.array([lo]), np.array([hi])) for lo, hi in L.pieces()], L.approximate
    parts = _separable_or_none(f)
    if parts is not None:
        sets = [limiting_subdiff(g, float(xi)) for g, xi in zip(parts, x)]
        boxes = [
            (np.array([p[0] for p in combo]), np.array([p[1] for p in combo]))
            for combo in itertools.product(*(s.pieces() for s in sets))
        ]
        return boxes, any(s.approximate for s in sets)
    try:
        g = gradient(f, x)
        return [(g, g.copy())], False
    except UnsupportedAtomError:
        logger.warning(f"limiting subdifferential of {f} at {x} estimated by differences")
        g = _numeric_gradient(f, x)
        return [(g, g.copy())], True


def lipschitz_verdict(f: PiecewiseFunction, x: VectorLike) -> Tuple[bool, bool]:
    """(singular set is {0}, approximate) at x."""
    x = Point(x)
    if f.dimension == 1:
        S = singular_subdiff(f, float(x[0]))
        return S.is_zero, S.approximate
    parts = _separable_or_none(f)
    if parts is not None:
        sets = [singular_subdiff(g, float(xi)) for g, xi in zip(parts, x)]
        return all(s.is_zero for s in sets), any(s.approximate for s in sets)
    try:
        gradient(f, x)
        return True, False
    except UnsupportedAtomError:
        pass
    logger.warning(f"Lipschitz test of {f} at {x} estimated by sampling")
    rng = np.random.default_rng(0)
    directions = rng.normal(size=(64, len(x)))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    ts = geometric_levels(6)
    slopes = []
    for t in ts:
        values = f.evaluate_many(x + t * directions)
        slopes.append(float(np.max(np.abs(values - evaluate(f, x)))) / t)
    return not is_blow_up(ts, slopes), True
