"""
Expression trees for piece bodies.

Every node evaluates on a batch of points at once (`evaluate_many` takes an
(N, n) array), knows its one-sided expansion around a 1-D point (`expand`)
and its exact gradient where it is differentiable (`gradient`).

Rational exponents are reduced `Fraction`s. Odd denominators use the real
signed root, so Power(x, 1/3) is the real cube root on all of R; even
denominators restrict the domain to nonnegative bases and evaluate to NaN
outside it (callers turn NaN into +inf).

"""
import math
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .exceptions import DataError, UnsupportedAtomError
from .series import Oscillation, Series, signed_power
from .types_definitions import JSONDict, Matrix, Vector

__all__ = [
    "Expr",
    "Constant",
    "Affine",
    "Power",
    "Abs",
    "Square",
    "SquaredDistance",
    "Sum",
    "Scale",
    "Max",
    "Min",
    "Oscillatory",
    "kink_points",
    "resolve_branches",
    "split_separable",
    "restrict",
    "polynomial",
]

ROOT_IMAG_TOL = 1e-12


class Expr(metaclass=ABCMeta):
    """Base class of expression nodes."""

    kind = "expr"

    @property
    def children(self) -> Tuple["Expr", ...]:
        return ()

    @abstractmethod
    def evaluate_many(self, points: Matrix) -> np.ndarray:
        """Values at every row of `points`."""
        raise NotImplementedError

    @abstractmethod
    def expand(self, x0: float, side: int) -> Series:
        """One-sided expansion around the 1-D point x0."""
        raise NotImplementedError

    @abstractmethod
    def gradient(self, x: Vector) -> Vector:
        """Exact gradient; UnsupportedAtomError where not differentiable."""
        raise NotImplementedError

    @abstractmethod
    def to_dict(self) -> JSONDict:
        raise NotImplementedError

    def evaluate(self, x: Vector) -> float:
        return float(self.evaluate_many(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def support(self) -> FrozenSet[int]:
        """Coordinates the node depends on."""
        out: FrozenSet[int] = frozenset()
        for child in self.children:
            out = out | child.support()
        return out

    def dimension(self) -> Optional[int]:
        found = None
        for child in self.children:
            d = child.dimension()
            if d is None:
                continue
            if found is not None and d != found:
                raise DataError(f"expression mixes dimensions {found} and {d}")
            found = d
        return found

    def with_children(self, children: Sequence["Expr"]) -> "Expr":
        return self


@dataclass(frozen=True)
class Constant(Expr):
    value: float

    kind = "const"

    def evaluate_many(self, points):
        return np.full(len(points), float(self.value))

    def expand(self, x0, side):
        return Series.constant(self.value)

    def gradient(self, x):
        return np.zeros(len(np.atleast_1d(x)))

    def to_dict(self):
        return {"op": self.kind, "value": self.value}


@dataclass(frozen=True)
class Affine(Expr):
    """a.x + b."""

    coefficients: Tuple[float, ...]
    offset: float = 0.0

    kind = "affine"

    def __post_init__(self):
        coefficients = tuple(float(a) for a in np.atleast_1d(self.coefficients))
        if not coefficients:
            raise DataError("affine node needs at least one coefficient")
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "offset", float(self.offset))

    def _check(self, points):
        if points.shape[1] != len(self.coefficients):
            raise DataError(
                f"affine node of dimension {len(self.coefficients)} "
                f"evaluated on points of dimension {points.shape[1]}"
            )

    def evaluate_many(self, points):
        self._check(points)
        return points @ np.asarray(self.coefficients) + self.offset

    def expand(self, x0, side):
        if len(self.coefficients) != 1:
            raise DataError("one-sided expansions are 1-D only")
        a = self.coefficients[0]
        return Series.build({Fraction(0): a * x0 + self.offset, Fraction(1): side * a})

    def gradient(self, x):
        return np.asarray(self.coefficients, dtype=float)

    def support(self):
        return frozenset(i for i, a in enumerate(self.coefficients) if a != 0)

    def dimension(self):
        return len(self.coefficients)

    def to_dict(self):
        return {"op": self.kind, "coef": list(self.coefficients), "offset": self.offset}


@dataclass(frozen=True)
class Power(Expr):
    """base ** exponent with a reduced rational exponent."""

    base: Expr
    exponent: Fraction

    kind = "pow"

    def __post_init__(self):
        exponent = self.exponent
        if isinstance(exponent, float):
            exponent = Fraction(exponent).limit_denominator(1000)
        object.__setattr__(self, "exponent", Fraction(exponent))

    @property
    def children(self):
        return (self.base,)

    def with_children(self, children):
        return replace(self, base=children[0])

    def evaluate_many(self, points):
        b = self.base.evaluate_many(points)
        r = self.exponent
        with np.errstate(invalid="ignore", divide="ignore"):
            magnitude = np.abs(b) ** float(r)
            if r.denominator % 2 == 0:
                return np.where(b >= 0, magnitude, np.nan)
            if r.numerator % 2:
                return np.sign(b) * magnitude + 0.0
            return magnitude

    def expand(self, x0, side):
        return self.base.expand(x0, side).power(self.exponent)

    def gradient(self, x):
        b = self.base.evaluate(x)
        r = self.exponent
        if b == 0 and r < 1:
            raise UnsupportedAtomError(f"power {r} is not differentiable at a zero base")
        if b < 0 and r.denominator % 2 == 0:
            raise UnsupportedAtomError("even root of a negative base")
        slope = float(r) * abs(b) ** float(r - 1) if b != 0 else (1.0 if r == 1 else 0.0)
        if b < 0 and r.numerator % 2 == 0:
            slope = -slope
        return slope * self.base.gradient(x)

    def to_dict(self):
        return {"op": self.kind, "base": self.base.to_dict(), "exponent": str(self.exponent)}


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr

    kind = "abs"

    @property
    def children(self):
        return (self.arg,)

    def with_children(self, children):
        return replace(self, arg=children[0])

    def evaluate_many(self, points):
        return np.abs(self.arg.evaluate_many(points))

    def expand(self, x0, side):
        return self.arg.expand(x0, side).absolute()

    def gradient(self, x):
        value = self.arg.evaluate(x)
        if value == 0:
            raise UnsupportedAtomError("absolute value at its kink")
        return math.copysign(1.0, value) * self.arg.gradient(x)

    def to_dict(self):
        return {"op": self.kind, "arg": self.arg.to_dict()}


@dataclass(frozen=True)
class Square(Expr):
    arg: Expr

    kind = "square"

    @property
    def children(self):
        return (self.arg,)

    def with_children(self, children):
        return replace(self, arg=children[0])

    def evaluate_many(self, points):
        v = self.arg.evaluate_many(points)
        return v * v

    def expand(self, x0, side):
        s = self.arg.expand(x0, side)
        return s * s

    def gradient(self, x):
        return 2.0 * self.arg.evaluate(x) * self.arg.gradient(x)

    def to_dict(self):
        return {"op": self.kind, "arg": self.arg.to_dict()}


@dataclass(frozen=True)
class SquaredDistance(Expr):
    """||x - center||^2."""

    center: Tuple[float, ...]

    kind = "sqdist"

    def __post_init__(self):
        object.__setattr__(
            self, "center", tuple(float(c) for c in np.atleast_1d(self.center))
        )

    def evaluate_many(self, points):
        if points.shape[1] != len(self.center):
            raise DataError(
                f"squared distance of dimension {len(self.center)} "
                f"evaluated on points of dimension {points.shape[1]}"
            )
        diff = points - np.asarray(self.center)
        return np.einsum("ij,ij->i", diff, diff)

    def expand(self, x0, side):
        if len(self.center) != 1:
            raise DataError("one-sided expansions are 1-D only")
        d = x0 - self.center[0]
        return Series.build({Fraction(0): d * d, Fraction(1): 2.0 * d * side, Fraction(2): 1.0})

    def gradient(self, x):
        return 2.0 * (np.asarray(x, dtype=float) - np.asarray(self.center))

    def support(self):
        return frozenset(range(len(self.center)))

    def dimension(self):
        return len(self.center)

    def to_dict(self):
        return {"op": self.kind, "center": list(self.center)}


@dataclass(frozen=True)
class Sum(Expr):
    args: Tuple[Expr, ...]

    kind = "sum"

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise DataError("sum node needs at least one child")

    @property
    def children(self):
        return self.args

    def with_children(self, children):
        return replace(self, args=tuple(children))

    def evaluate_many(self, points):
        total = self.args[0].evaluate_many(points)
        for child in self.args[1:]:
            total = total + child.evaluate_many(points)
        return total

    def expand(self, x0, side):
        total = self.args[0].expand(x0, side)
        for child in self.args[1:]:
            total = total + child.expand(x0, side)
        return total

    def gradient(self, x):
        return sum(child.gradient(x) for child in self.args)

    def to_dict(self):
        return {"op": self.kind, "args": [a.to_dict() for a in self.args]}


@dataclass(frozen=True)
class Scale(Expr):
    coefficient: float
    arg: Expr

    kind = "scale"

    @property
    def children(self):
        return (self.arg,)

    def with_children(self, children):
        return replace(self, arg=children[0])

    def evaluate_many(self, points):
        return float(self.coefficient) * self.arg.evaluate_many(points)

    def expand(self, x0, side):
        return self.arg.expand(x0, side).scale(self.coefficient)

    def gradient(self, x):
        return float(self.coefficient) * self.arg.gradient(x)

    def to_dict(self):
        return {"op": self.kind, "coef": self.coefficient, "arg": self.arg.to_dict()}


class _Extremum(Expr):
    args: Tuple[Expr, ...]
    _reduce = None
    _direction = 1

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise DataError(f"{self.kind} node needs at least one child")

    @property
    def children(self):
        return self.args

    def with_children(self, children):
        return replace(self, args=tuple(children))

    def evaluate_many(self, points):
        values = [child.evaluate_many(points) for child in self.args]
        # NaN (off-domain) wins so the caller sees +inf
        return type(self)._reduce.reduce(values)

    def expand(self, x0, side):
        expansions = [child.expand(x0, side) for child in self.args]
        if any(s.outside for s in expansions):
            return Series.off_domain()
        best = expansions[0]
        for candidate in expansions[1:]:
            if self._direction * candidate.compare(best) > 0:
                best = candidate
        return best

    def gradient(self, x):
        values = [child.evaluate(x) for child in self.args]
        target = max(values) if self._direction > 0 else min(values)
        active = [child for child, v in zip(self.args, values) if v == target]
        grads = [child.gradient(x) for child in active]
        if any(not np.allclose(g, grads[0], rtol=0, atol=1e-12) for g in grads[1:]):
            raise UnsupportedAtomError(f"{self.kind} at a switching point")
        return grads[0]

    def to_dict(self):
        return {"op": self.kind, "args": [a.to_dict() for a in self.args]}


@dataclass(frozen=True)
class Max(_Extremum):
    args: Tuple[Expr, ...]

    kind = "max"
    _reduce = np.maximum
    _direction = 1


@dataclass(frozen=True)
class Min(_Extremum):
    args: Tuple[Expr, ...]

    kind = "min"
    _reduce = np.minimum
    _direction = -1


def _oscillatory_jet(u: float, order: int) -> Tuple[float, float, float]:
    # h(u) = u**order * sin(1/u) and its first two derivatives
    s, c = math.sin(1.0 / u), math.cos(1.0 / u)
    if order == 1:
        return u * s, s - c / u, -s / u ** 3
    return u * u * s, 2.0 * u * s - c, 2.0 * s - 2.0 * c / u - s / (u * u)


@dataclass(frozen=True)
class Oscillatory(Expr):
    """
    arg**order * sin(1/arg), extended by 0 where arg == 0; order is 1 or 2.

    """

    arg: Expr
    order: int = 1

    kind = "xsin"

    def __post_init__(self):
        if self.order not in (1, 2):
            raise DataError("oscillatory atoms support order 1 or 2")

    @property
    def children(self):
        return (self.arg,)

    def with_children(self, children):
        return replace(self, arg=children[0])

    def evaluate_many(self, points):
        u = self.arg.evaluate_many(points)
        safe = np.where(u == 0, 1.0, u)
        with np.errstate(invalid="ignore", over="ignore"):
            return np.where(u == 0, 0.0, safe ** self.order * np.sin(1.0 / safe))

    def expand(self, x0, side):
        u = self.arg.expand(x0, side)
        if u.outside:
            return u
        if u.oscillation is not None:
            raise UnsupportedAtomError("nested oscillatory atoms")
        u0 = u.value
        delta = u.increment()
        if u0 != 0:
            h0, h1, h2 = _oscillatory_jet(u0, self.order)
            if not delta.terms:
                return Series.build({Fraction(0): h0}, u.precision)
            e_min = delta.terms[0][0]
            composed = (
                Series.constant(h0) + delta.scale(h1) + (delta * delta).scale(h2 / 2.0)
            )
            return Series.build(
                composed.as_dict(), min(composed.precision, 3 * e_min)
            )
        if len(delta.terms) != 1 or delta.terms[0][0] != 1 or delta.precision != math.inf:
            raise UnsupportedAtomError("oscillatory atom needs an affine argument at its zero")
        c = abs(delta.terms[0][1])
        slope_amp = math.inf if self.order == 1 else c
        return Series(
            terms=(),
            precision=math.inf,
            oscillation=Oscillation(self.order, c ** self.order, slope_amp),
        )

    def gradient(self, x):
        u = self.arg.evaluate(x)
        if u == 0:
            if self.order == 2:
                return np.zeros(len(np.atleast_1d(x)))
            raise UnsupportedAtomError("u*sin(1/u) is not differentiable at u = 0")
        return _oscillatory_jet(u, self.order)[1] * self.arg.gradient(x)

    def to_dict(self):
        return {"op": self.kind, "arg": self.arg.to_dict(), "order": self.order}


# 1-D structure helpers used by combine() and the calculus engine


def polynomial(expr: Expr) -> Optional[np.ndarray]:
    """
    Ascending coefficients of a kink-free 1-D body of degree <= 2, or None
    when the body is not such a polynomial.

    """
    if isinstance(expr, Constant):
        return np.array([float(expr.value)])
    if isinstance(expr, Affine):
        if len(expr.coefficients) != 1:
            return None
        return np.array([expr.offset, expr.coefficients[0]])
    if isinstance(expr, SquaredDistance):
        if len(expr.center) != 1:
            return None
        c = expr.center[0]
        return np.array([c * c, -2.0 * c, 1.0])
    if isinstance(expr, Square):
        p = polynomial(expr.arg)
        return None if p is None or len(p) > 2 else npoly.polymul(p, p)
    if isinstance(expr, Power) and expr.exponent in (1, 2):
        p = polynomial(expr.base)
        if p is None:
            return None
        out = p if expr.exponent == 1 else npoly.polymul(p, p)
        return out if len(out) <= 3 else None
    if isinstance(expr, Scale):
        p = polynomial(expr.arg)
        return None if p is None else float(expr.coefficient) * p
    if isinstance(expr, Sum):
        total = np.array([0.0])
        for child in expr.args:
            p = polynomial(child)
            if p is None:
                return None
            total = npoly.polyadd(total, p)
        return total
    return None


def _real_roots(coefficients: np.ndarray, lo: float, hi: float) -> List[float]:
    c = np.trim_zeros(np.asarray(coefficients, dtype=float), "b")
    if len(c) <= 1:
        return []
    roots = npoly.polyroots(c)
    out = []
    for r in roots:
        if abs(r.imag) <= ROOT_IMAG_TOL * (1.0 + abs(r.real)) and lo < r.real < hi:
            out.append(float(r.real))
    return out


def _midpoint(lo: float, hi: float) -> float:
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def _segments(points: Sequence[float], lo: float, hi: float) -> List[Tuple[float, float]]:
    cuts = [lo] + sorted(set(points)) + [hi]
    return [(cuts[k], cuts[k + 1]) for k in range(len(cuts) - 1)]


def kink_points(expr: Expr, lo: float, hi: float) -> List[float]:
    """
    Points of (lo, hi) where an abs/max/min node of a 1-D body switches
    branch, found exactly from polynomial arguments.

    """
    found = set()
    for child in expr.children:
        found.update(kink_points(child, lo, hi))
    if isinstance(expr, (Abs, Max, Min)):
        for a, b in _segments(sorted(found), lo, hi):
            args = [resolve_branches(child, a, b) for child in expr.children]
            polys = [polynomial(child) for child in args]
            if any(p is None for p in polys):
                continue
            if isinstance(expr, Abs):
                found.update(_real_roots(polys[0], a, b))
                continue
            for i in range(len(polys)):
                for j in range(i + 1, len(polys)):
                    found.update(_real_roots(npoly.polysub(polys[i], polys[j]), a, b))
    return sorted(found)


def resolve_branches(expr: Expr, lo: float, hi: float) -> Expr:
    """
    Replace abs/max/min nodes by their active branch on (lo, hi), assuming
    no kink of `expr` lies inside the interval. Nodes whose branch cannot
    be decided exactly are kept.

    """
    if not expr.children:
        return expr
    resolved = expr.with_children([resolve_branches(c, lo, hi) for c in expr.children])
    mid = np.array([[_midpoint(lo, hi)]])
    if isinstance(resolved, Abs):
        if polynomial(resolved.arg) is None:
            return resolved
        value = resolved.arg.evaluate_many(mid)[0]
        return resolved.arg if value >= 0 else Scale(-1.0, resolved.arg)
    if isinstance(resolved, (Max, Min)):
        if any(polynomial(child) is None for child in resolved.args):
            return resolved
        values = [child.evaluate_many(mid)[0] for child in resolved.args]
        pick = int(np.argmax(values) if isinstance(resolved, Max) else np.argmin(values))
        return resolved.args[pick]
    return resolved


def restrict(expr: Expr, index: int) -> Expr:
    """Rewrite a body depending on coordinate `index` only as a 1-D body."""
    if isinstance(expr, Affine):
        return Affine((expr.coefficients[index],), expr.offset)
    if isinstance(expr, SquaredDistance):
        return Square(Affine((1.0,), -expr.center[index]))
    if not expr.children:
        return expr
    return expr.with_children([restrict(c, index) for c in expr.children])


def split_separable(expr: Expr) -> Optional[Tuple[float, Dict[int, List[Expr]]]]:
    """
    Split a body into constant + sum of 1-D terms g_i(x_i), or None when
    some term couples coordinates.

    """
    if isinstance(expr, Constant):
        return float(expr.value), {}
    if isinstance(expr, SquaredDistance):
        return 0.0, {
            i: [Square(Affine((1.0,), -c))] for i, c in enumerate(expr.center)
        }
    if isinstance(expr, Sum):
        constant, terms = 0.0, {}
        for child in expr.args:
            part = split_separable(child)
            if part is None:
                return None
            constant += part[0]
            for i, items in part[1].items():
                terms.setdefault(i, []).extend(items)
        return constant, terms
    if isinstance(expr, Scale):
        part = split_separable(expr.arg)
        if part is None:
            return None
        k = float(expr.coefficient)
        return k * part[0], {
            i: [Scale(k, t) for t in items] for i, items in part[1].items()
        }
    support = expr.support()
    if len(support) > 1:
        return None
    index = next(iter(support)) if support else 0
    return 0.0, {index: [restrict(expr, index)]}
