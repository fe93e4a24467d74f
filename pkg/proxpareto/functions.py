"""
Piecewise-defined extended-real-valued functions and vector objectives.

A `PiecewiseFunction` is an ordered list of pieces (guard, body). A guard
is a conjunction of affine inequalities; a point is evaluated by the first
piece whose guard holds there, and points no guard accepts are outside the
domain and evaluate to +inf. Bodies returning NaN (an even root of a
negative number) are outside the domain too.

"""
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .exceptions import DataError, DomainError
from .expressions import (
    Affine,
    Constant,
    Expr,
    Max,
    Scale,
    Square,
    SquaredDistance,
    Sum,
    kink_points,
    polynomial,
    resolve_branches,
    split_separable,
)
from .logging_utils import logger
from .series import Series
from .type_constructors import Point
from .types_definitions import JSONDict, Matrix, Side, Vector, VectorLike

__all__ = [
    "AffineInequality",
    "Piece",
    "PiecewiseFunction",
    "VectorFunction",
    "evaluate",
    "combine",
    "build_prox_objective",
    "separable_parts",
    "gradient",
]

CONTINUITY_TOL = 1e-12
UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class AffineInequality:
    """normal . x <= bound, or < bound when strict."""

    normal: Tuple[float, ...]
    bound: float
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(float(a) for a in np.atleast_1d(self.normal)))
        object.__setattr__(self, "bound", float(self.bound))

    def holds_many(self, points: Matrix) -> np.ndarray:
        lhs = points @ np.asarray(self.normal)
        return lhs < self.bound if self.strict else lhs <= self.bound

    def to_dict(self) -> JSONDict:
        return {"a": list(self.normal), "b": self.bound, "strict": self.strict}

    @classmethod
    def lower(cls, value: float, index: int = 0, dimension: int = 1, strict: bool = False):
        """x_index >= value (or >)."""
        normal = [0.0] * dimension
        normal[index] = -1.0
        return cls(tuple(normal), -value, strict)

    @classmethod
    def upper(cls, value: float, index: int = 0, dimension: int = 1, strict: bool = False):
        """x_index <= value (or <)."""
        normal = [0.0] * dimension
        normal[index] = 1.0
        return cls(tuple(normal), value, strict)


Guard = Tuple[AffineInequality, ...]


@dataclass(frozen=True)
class Bounds1D:
    """The set a 1-D guard describes: an interval with open/closed ends."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = True
    empty: bool = False

    def contains(self, x: float) -> bool:
        if self.empty:
            return False
        above = x > self.lo or (x == self.lo and not self.lo_open)
        below = x < self.hi or (x == self.hi and not self.hi_open)
        return above and below

    def covers_side(self, x: float, side: Side) -> bool:
        """Whether the guard holds on (x, x + eps) (side +1) or (x - eps, x)."""
        if self.empty:
            return False
        if side > 0:
            return self.lo <= x < self.hi
        return self.lo < x <= self.hi


def guard_bounds(guard: Guard) -> Bounds1D:
    lo, hi, lo_open, hi_open = -math.inf, math.inf, True, True
    for ineq in guard:
        a = ineq.normal[0]
        if a == 0:
            if ineq.bound < 0 or (ineq.strict and ineq.bound == 0):
                return Bounds1D(empty=True)
            continue
        limit = ineq.bound / a
        if a > 0:
            if limit < hi or (limit == hi and ineq.strict):
                hi, hi_open = limit, ineq.strict
        elif limit > lo or (limit == lo and ineq.strict):
            lo, lo_open = limit, ineq.strict
    if lo > hi or (lo == hi and (lo_open or hi_open)):
        return Bounds1D(empty=True)
    return Bounds1D(lo, hi, lo_open, hi_open)


def guard_is_empty(guard: Guard, dimension: int) -> bool:
    """Exact in 1-D; in n-D a slack-maximising LP decides."""
    if not guard:
        return False
    if dimension == 1:
        return guard_bounds(guard).empty
    # maximize s subject to a.x + s <= b on strict rows, a.x <= b otherwise, s <= 1
    A = np.array([list(g.normal) + [1.0 if g.strict else 0.0] for g in guard])
    b = np.array([g.bound for g in guard])
    c = np.zeros(dimension + 1)
    c[-1] = -1.0
    bounds = [(None, None)] * dimension + [(None, 1.0)]
    result = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if result.status == 2:
        return True
    if not any(g.strict for g in guard):
        return False
    return result.status != 0 or -result.fun <= 0


@dataclass(frozen=True)
class Piece:
    guard: Guard
    body: Expr

    def __post_init__(self):
        object.__setattr__(self, "guard", tuple(self.guard))

    def holds_many(self, points: Matrix) -> np.ndarray:
        mask = np.ones(len(points), dtype=bool)
        for ineq in self.guard:
            mask &= ineq.holds_many(points)
        return mask


@dataclass(frozen=True)
class PiecewiseFunction:
    dimension: int
    pieces: Tuple[Piece, ...]
    continuous: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if self.dimension < 1:
            raise DataError("dimension must be positive")
        if not self.pieces:
            raise DataError("a piecewise function needs at least one piece")
        for piece in self.pieces:
            for ineq in piece.guard:
                if len(ineq.normal) != self.dimension:
                    raise DataError(
                        f"guard of dimension {len(ineq.normal)} in a function of "
                        f"dimension {self.dimension}"
                    )
            d = piece.body.dimension()
            if d is not None and d != self.dimension:
                raise DataError(
                    f"body of dimension {d} in a function of dimension {self.dimension}"
                )

    @classmethod
    def single(cls, body: Expr, dimension: Optional[int] = None, name: str = "", continuous: bool = True):
        """A function with one unguarded piece."""
        dimension = dimension or body.dimension() or 1
        return cls(dimension, (Piece((), body),), continuous, name)

    def __str__(self) -> str:
        return self.name or f"<piecewise function of {len(self.pieces)} pieces on R^{self.dimension}>"

    # evaluation

    def evaluate_many(self, points: Matrix) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dimension:
            raise DataError(
                f"points of shape {X.shape} for a function on R^{self.dimension}"
            )
        values = np.full(len(X), math.inf)
        assigned = np.zeros(len(X), dtype=bool)
        for piece in self.pieces:
            mask = ~assigned & piece.holds_many(X)
            if mask.any():
                values[mask] = piece.body.evaluate_many(X[mask])
                assigned |= mask
        values[np.isnan(values)] = math.inf
        return values

    def __call__(self, x: VectorLike) -> float:
        return evaluate(self, x)

    def in_domain(self, x: VectorLike) -> bool:
        return math.isfinite(evaluate(self, x))

    # 1-D structure

    def _require_1d(self):
        if self.dimension != 1:
            raise DataError(f"operation needs a 1-D function, {self} lives on R^{self.dimension}")

    def bounds(self, piece: Piece) -> Bounds1D:
        self._require_1d()
        return guard_bounds(piece.guard)

    def side_piece(self, x0: float, side: Side) -> Optional[Piece]:
        """The piece governing the points just left or right of x0."""
        self._require_1d()
        for piece in self.pieces:
            if guard_bounds(piece.guard).covers_side(x0, side):
                return piece
        return None

    def expand(self, x0: float, side: Side) -> Series:
        """One-sided expansion of the governing piece's body around x0."""
        piece = self.side_piece(x0, side)
        if piece is None:
            return Series.off_domain()
        return piece.body.expand(x0, side)

    def breakpoints(self) -> List[float]:
        """Finite guard endpoints and body kinks of a 1-D function."""
        self._require_1d()
        out = set()
        for piece in self.pieces:
            b = guard_bounds(piece.guard)
            if b.empty:
                continue
            out.update(v for v in (b.lo, b.hi) if math.isfinite(v))
            out.update(kink_points(piece.body, b.lo, b.hi))
        return sorted(out)

    def continuity_defect(self) -> float:
        """
        Largest jump between pieces sharing a guard endpoint (1-D). n-D
        functions return 0.0 since boundaries are not enumerated there.

        """
        if self.dimension != 1:
            return 0.0
        worst = 0.0
        for c in self.breakpoints():
            values = []
            for piece in self.pieces:
                b = guard_bounds(piece.guard)
                if not b.empty and b.lo <= c <= b.hi:
                    value = piece.body.evaluate_many(np.array([[c]]))[0]
                    if math.isfinite(value):
                        values.append(value)
            if values:
                worst = max(worst, max(values) - min(values))
        return worst

    def check_continuity(self) -> bool:
        return self.continuity_defect() <= CONTINUITY_TOL

    def map_bodies(self, transform) -> "PiecewiseFunction":
        return PiecewiseFunction(
            self.dimension,
            tuple(Piece(p.guard, transform(p.body)) for p in self.pieces),
            self.continuous,
            self.name,
        )

    def scaled(self, coefficient: float) -> "PiecewiseFunction":
        return self.map_bodies(lambda body: Scale(coefficient, body))


@dataclass(frozen=True)
class VectorFunction:
    components: Tuple[PiecewiseFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise DataError("a vector function needs at least one component")
        dims = {f.dimension for f in self.components}
        if len(dims) != 1:
            raise DataError(f"components live in different dimensions {sorted(dims)}")

    @property
    def dimension(self) -> int:
        return self.components[0].dimension

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, index: int) -> PiecewiseFunction:
        return self.components[index]

    def __iter__(self):
        return iter(self.components)

    def evaluate_many(self, points: Matrix) -> np.ndarray:
        """Values as an (N, m) array."""
        return np.column_stack([f.evaluate_many(points) for f in self.components])

    def __call__(self, x: VectorLike) -> Vector:
        x = Point(x)
        return self.evaluate_many(x[None, :])[0]


def evaluate(f: PiecewiseFunction, x: VectorLike) -> float:
    x = Point(x)
    if len(x) != f.dimension:
        raise DataError(f"point of dimension {len(x)} for a function on R^{f.dimension}")
    return float(f.evaluate_many(x[None, :])[0])


def _canonical(body: Expr) -> Expr:
    p = polynomial(body)
    if p is None:
        return body
    p = np.trim_zeros(p, "b")
    if len(p) == 0:
        return Constant(0.0)
    if len(p) == 1:
        return Constant(float(p[0]))
    linear = Affine((float(p[1]),), float(p[0]))
    if len(p) == 2:
        return linear
    return Sum((Scale(float(p[2]), Square(Affine((1.0,)))), linear))


def _split_1d(guard: Guard, body: Expr, canonical: bool) -> List[Piece]:
    bounds = guard_bounds(guard)
    cuts = kink_points(body, bounds.lo, bounds.hi)
    if not cuts:
        resolved = resolve_branches(body, bounds.lo, bounds.hi)
        return [Piece(guard, _canonical(resolved) if canonical else resolved)]
    edges = [bounds.lo] + cuts + [bounds.hi]
    out = []
    for k in range(len(edges) - 1):
        extra = []
        if k > 0:
            extra.append(AffineInequality.lower(edges[k]))
        if k < len(edges) - 2:
            extra.append(AffineInequality.upper(edges[k + 1], strict=True))
        resolved = resolve_branches(body, edges[k], edges[k + 1])
        out.append(Piece(tuple(guard) + tuple(extra), _canonical(resolved) if canonical else resolved))
    return out


def _split_affine_max(guard: Guard, body: Expr, dimension: int) -> List[Piece]:
    if not (isinstance(body, Max) and len(body.args) == 2
            and all(isinstance(a, Affine) for a in body.args)):
        return [Piece(guard, body)]
    first, second = body.args
    a1, a2 = np.asarray(first.coefficients), np.asarray(second.coefficients)
    # first >= second  <=>  (a2 - a1).x <= b1 - b2
    keep_first = AffineInequality(tuple(a2 - a1), first.offset - second.offset)
    keep_second = AffineInequality(tuple(a1 - a2), second.offset - first.offset, strict=True)
    out = []
    for extra, branch in ((keep_first, first), (keep_second, second)):
        g = tuple(guard) + (extra,)
        if not guard_is_empty(g, dimension):
            out.append(Piece(g, branch))
    return out


def combine(kind: str, fs: Sequence[PiecewiseFunction]) -> PiecewiseFunction:
    """
    Pointwise sum or max on the common refinement of the piece partitions.

    Pieces are intersected in lexicographic order so first-match evaluation
    picks the same member pieces as evaluating each member separately. 1-D
    bodies are further split where abs/max/min nodes switch branch, and
    affine-vs-affine maxima in R^n are split along their switching plane.

    """
    if kind not in ("sum", "max"):
        raise DataError(f"unknown combination {kind!r}")
    if not fs:
        raise DataError("combine needs at least one function")
    dims = {f.dimension for f in fs}
    if len(dims) != 1:
        raise DataError(f"cannot combine functions on different dimensions {sorted(dims)}")
    n = dims.pop()
    logger.debug(f"combine {kind} of {len(fs)} functions on R^{n}")

    pieces: List[Piece] = []
    for selection in itertools.product(*(f.pieces for f in fs)):
        guard = tuple(itertools.chain.from_iterable(p.guard for p in selection))
        if guard_is_empty(guard, n):
            continue
        bodies = tuple(p.body for p in selection)
        if len(bodies) == 1:
            body = bodies[0]
        else:
            body = Sum(bodies) if kind == "sum" else Max(bodies)
        if n == 1:
            pieces.extend(_split_1d(guard, body, canonical=kind == "sum"))
        elif kind == "max":
            pieces.extend(_split_affine_max(guard, body, n))
        else:
            pieces.append(Piece(guard, body))
    if not pieces:
        raise DomainError("the combined function has an empty domain")
    name = f"{kind}(" + ", ".join(str(f) for f in fs) + ")"
    return PiecewiseFunction(n, tuple(pieces), all(f.continuous for f in fs), name)


def build_prox_objective(
    F: VectorFunction, center: VectorLike, lam: float, weights: VectorLike
) -> VectorFunction:
    """psi_i(x) = f_i(x) + lam * ||x - center||^2 * weights_i."""
    center = Point(center)
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    logger.debug(f"build_prox_objective center={center} lam={lam} weights={weights}")
    if not lam > 0:
        raise DataError(f"lambda must be positive, got {lam}")
    if len(weights) != len(F):
        raise DataError(f"{len(weights)} weights for {len(F)} objectives")
    if np.any(weights <= 0):
        raise DataError(f"weights must be positive, got {weights}")
    if abs(np.linalg.norm(weights) - 1.0) > UNIT_NORM_TOL:
        raise DataError(f"weights must have unit norm, got norm {np.linalg.norm(weights)}")
    if len(center) != F.dimension:
        raise DataError(f"center of dimension {len(center)} for objectives on R^{F.dimension}")
    if not np.all(np.isfinite(F(center))):
        raise DomainError(f"center {center} lies outside the domain of the objectives")
    prox = SquaredDistance(tuple(center))
    components = []
    for f, w in zip(F, weights):
        term = Scale(lam * float(w), prox)
        components.append(f.map_bodies(lambda body, term=term: Sum((body, term))))
    return VectorFunction(tuple(components))


def separable_parts(f: PiecewiseFunction) -> Optional[List[PiecewiseFunction]]:
    """
    Split f(x) = sum_i g_i(x_i) into 1-D functions, or None when f has
    several pieces, a guard coupling coordinates, or a coupled body.

    """
    if len(f.pieces) != 1:
        return None
    piece = f.pieces[0]
    per_coordinate: List[List[AffineInequality]] = [[] for _ in range(f.dimension)]
    for ineq in piece.guard:
        support = [i for i, a in enumerate(ineq.normal) if a != 0]
        if len(support) > 1:
            return None
        index = support[0] if support else 0
        per_coordinate[index].append(
            AffineInequality((ineq.normal[index],), ineq.bound, ineq.strict)
        )
    split = split_separable(piece.body)
    if split is None:
        return None
    constant, terms = split
    parts = []
    for i in range(f.dimension):
        items = list(terms.get(i, []))
        if i == 0 and constant != 0:
            items.append(Constant(constant))
        body = items[0] if len(items) == 1 else Sum(tuple(items)) if items else Constant(0.0)
        parts.append(
            PiecewiseFunction(1, (Piece(tuple(per_coordinate[i]), body),), f.continuous, f"{f}[{i}]")
        )
    return parts


def gradient(f: PiecewiseFunction, x: VectorLike) -> Vector:
    """
    Exact gradient at a point interior to one piece; UnsupportedAtomError
    at kinks, DomainError outside the domain.

    """
    x = Point(x)
    if not f.in_domain(x):
        raise DomainError(f"{x} lies outside the domain of {f}")
    X = x[None, :]
    for piece in f.pieces:
        if piece.holds_many(X)[0]:
            return np.asarray(piece.body.gradient(x), dtype=float)
    raise DomainError(f"{x} lies outside the domain of {f}")
