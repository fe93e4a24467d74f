"""
Constrained multiobjective problems, their proximal regularizations and
the brute-force Pareto oracle.

"""
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CapacityError, DataError, DomainError
from .functions import PiecewiseFunction, VectorFunction, build_prox_objective
from .logging_utils import logger
from .parallel import ordered_map
from .realsets import RealSet1D
from .type_constructors import Point, as_points
from .types_definitions import JSONDict, Matrix, Vector, VectorLike

__all__ = [
    "ConstraintSet",
    "NormalCone",
    "MOProblem",
    "RegularizedProblem",
    "Grid",
    "ParetoResult",
    "ScanResult",
    "distance_and_projection",
    "normal_cone",
    "dist_subdiff",
    "dominates",
    "pareto_bruteforce",
    "is_pareto_point",
    "phi_gamma",
    "phi_gamma_scan",
    "penalized_value",
]

LEVEL_TOL = 1e-12
TIE_TOL = 1e-15
ACTIVE_TOL = 1e-12
DEFAULT_GRID_CAP = 10 ** 7
CHUNK = 65536


@dataclass(frozen=True)
class ConstraintSet:
    """Whole space, a box, or a polyhedron {x : A x <= b}."""

    kind: str
    dimension: int
    lower: Tuple[float, ...] = ()
    upper: Tuple[float, ...] = ()
    normals: Tuple[Tuple[float, ...], ...] = ()
    bounds: Tuple[float, ...] = ()
    feasible_point: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise DataError("dimension must be positive")
        if self.kind == "box":
            if len(self.lower) != self.dimension or len(self.upper) != self.dimension:
                raise DataError("box bounds must match the dimension")
            if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
                raise DataError(f"box has lo > hi: {self.lower} {self.upper}")
        elif self.kind == "polyhedron":
            if len(self.normals) != len(self.bounds) or not self.normals:
                raise DataError("a polyhedron needs matching rows and bounds")
            if any(len(row) != self.dimension for row in self.normals):
                raise DataError("polyhedron rows must match the dimension")
            if self.feasible_point is None or not self.contains(self.feasible_point):
                raise DataError("a polyhedron needs a feasible point certifying nonemptiness")
        elif self.kind != "whole":
            raise DataError(f"unknown constraint set kind {self.kind!r}")

    @classmethod
    def whole(cls, dimension: int = 1) -> "ConstraintSet":
        return cls("whole", dimension)

    @classmethod
    def box(cls, lower: VectorLike, upper: VectorLike) -> "ConstraintSet":
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        return cls("box", len(lo), tuple(lo), tuple(hi))

    @classmethod
    def polyhedron(cls, A: Sequence[Sequence[float]], b: VectorLike, feasible_point: VectorLike) -> "ConstraintSet":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        return cls(
            "polyhedron", A.shape[1], normals=tuple(tuple(r) for r in A),
            bounds=tuple(b), feasible_point=tuple(Point(feasible_point)),
        )

    @property
    def A(self) -> np.ndarray:
        return np.asarray(self.normals, dtype=float)

    @property
    def b(self) -> np.ndarray:
        return np.asarray(self.bounds, dtype=float)

    def contains_many(self, points: Matrix, tol: float = 0.0) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        if self.kind == "whole":
            return np.ones(len(X), dtype=bool)
        if self.kind == "box":
            lo, hi = np.asarray(self.lower), np.asarray(self.upper)
            return np.all((X >= lo - tol) & (X <= hi + tol), axis=1)
        return np.all(X @ self.A.T <= self.b + tol, axis=1)

    def contains(self, x: VectorLike, tol: float = 0.0) -> bool:
        return bool(self.contains_many(Point(x)[None, :], tol)[0])

    def _project_polyhedron(self, x: Vector) -> Vector:
        if self.contains(x):
            return x.copy()
        A, b = self.A, self.b
        rows = range(len(b))
        for size in range(1, min(len(b), self.dimension) + 1):
            for active in itertools.combinations(rows, size):
                As, bs = A[list(active)], b[list(active)]
                gram = As @ As.T
                if abs(np.linalg.det(gram)) < 1e-14:
                    continue
                multipliers = np.linalg.solve(gram, As @ x - bs)
                if np.any(multipliers < -1e-12):
                    continue
                y = x - As.T @ multipliers
                if self.contains(y, tol=1e-10):
                    return y
        raise DomainError(f"could not project {x} onto the polyhedron")

    def project(self, x: VectorLike) -> Vector:
        x = Point(x)
        if self.kind == "whole":
            return x.copy()
        if self.kind == "box":
            return np.clip(x, self.lower, self.upper)
        return self._project_polyhedron(x)

    def distance_many(self, points: Matrix) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        if self.kind == "whole":
            return np.zeros(len(X))
        if self.kind == "box":
            return np.linalg.norm(X - np.clip(X, self.lower, self.upper), axis=1)
        inside = self.contains_many(X)
        out = np.zeros(len(X))
        for k in np.flatnonzero(~inside):
            out[k] = np.linalg.norm(X[k] - self._project_polyhedron(X[k]))
        return out

    def to_dict(self) -> JSONDict:
        data: JSONDict = {"kind": self.kind, "dimension": self.dimension}
        if self.kind == "box":
            data.update(lower=list(self.lower), upper=list(self.upper))
        elif self.kind == "polyhedron":
            data.update(A=[list(r) for r in self.normals], b=list(self.bounds),
                        feasible_point=list(self.feasible_point))
        return data


def distance_and_projection(omega: ConstraintSet, x: VectorLike) -> Tuple[float, Vector]:
    """Euclidean distance to the set and the nearest point."""
    y = omega.project(x)
    return float(np.linalg.norm(Point(x) - y)), y


@dataclass(frozen=True)
class NormalCone:
    """
    Cone generated by `generators` ({0} when there are none), optionally
    truncated to the ball of radius `radius`.

    """

    generators: Tuple[Tuple[float, ...], ...]
    dimension: int
    radius: Optional[float] = None

    @property
    def is_trivial(self) -> bool:
        return not self.generators

    def matrix(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, self.dimension))
        return np.asarray(self.generators, dtype=float)

    def as_realset(self) -> RealSet1D:
        """The 1-D cone (or its truncation) as a set."""
        if self.dimension != 1:
            raise DataError("only 1-D cones convert to sets")
        reach = math.inf if self.radius is None else self.radius
        lo = -reach if any(g[0] < 0 for g in self.generators) else 0.0
        hi = reach if any(g[0] > 0 for g in self.generators) else 0.0
        return RealSet1D.interval(lo, hi)

    def to_dict(self) -> JSONDict:
        return {"generators": [list(g) for g in self.generators], "radius": self.radius}


def normal_cone(omega: ConstraintSet, xbar: VectorLike) -> NormalCone:
    """Outward normals of the constraints active at xbar."""
    xbar = Point(xbar)
    if not omega.contains(xbar, tol=ACTIVE_TOL):
        raise DomainError(f"{xbar} lies outside the constraint set")
    n = omega.dimension
    generators: List[Tuple[float, ...]] = []
    if omega.kind == "box":
        for i, (lo, hi) in enumerate(zip(omega.lower, omega.upper)):
            e = np.zeros(n)
            if math.isfinite(lo) and abs(xbar[i] - lo) <= ACTIVE_TOL * max(1.0, abs(lo)):
                e[i] = -1.0
                generators.append(tuple(e))
            if math.isfinite(hi) and abs(xbar[i] - hi) <= ACTIVE_TOL * max(1.0, abs(hi)):
                e = np.zeros(n)
                e[i] = 1.0
                generators.append(tuple(e))
    elif omega.kind == "polyhedron":
        slack = omega.b - omega.A @ xbar
        for row, s, bound in zip(omega.normals, slack, omega.bounds):
            if abs(s) <= ACTIVE_TOL * max(1.0, abs(bound)):
                generators.append(tuple(float(a) for a in row))
    return NormalCone(tuple(generators), n)


def dist_subdiff(omega: ConstraintSet, xbar: VectorLike):
    """
    Limiting subdifferential of the distance function at a point of the
    set: the normal cone cut to the unit ball. 1-D sets come back as a
    RealSet1D, n-D ones as a truncated NormalCone.

    """
    cone = normal_cone(omega, xbar)
    truncated = NormalCone(cone.generators, cone.dimension, radius=1.0)
    return truncated.as_realset() if omega.dimension == 1 else truncated


@dataclass(frozen=True)
class Grid:
    """Axis-aligned lattice lo_i + k*step."""

    ranges: Tuple[Tuple[float, float], ...]
    step: float
    cap: int = DEFAULT_GRID_CAP

    def __post_init__(self):
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.ranges)
        object.__setattr__(self, "ranges", ranges)
        if not self.step > 0:
            raise DataError(f"grid step must be positive, got {self.step}")
        if any(lo > hi for lo, hi in ranges):
            raise DataError(f"grid range with lo > hi: {ranges}")

    @classmethod
    def around(cls, center: VectorLike, radius: float, step: float, cap: int = DEFAULT_GRID_CAP) -> "Grid":
        c = Point(center)
        return cls(tuple((ci - radius, ci + radius) for ci in c), step, cap)

    @property
    def dimension(self) -> int:
        return len(self.ranges)

    def axis(self, i: int) -> np.ndarray:
        lo, hi = self.ranges[i]
        count = int(math.floor((hi - lo) / self.step + 1e-9)) + 1
        return np.round(lo + self.step * np.arange(count), 12)

    @property
    def size(self) -> int:
        return int(np.prod([len(self.axis(i)) for i in range(self.dimension)], dtype=float))

    def points(self) -> np.ndarray:
        if self.size > self.cap:
            raise CapacityError(f"grid of {self.size} points exceeds the cap {self.cap}")
        axes = [self.axis(i) for i in range(self.dimension)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])

    def to_dict(self) -> JSONDict:
        return {"ranges": [list(r) for r in self.ranges], "step": self.step, "cap": self.cap}


@dataclass(frozen=True)
class MOProblem:
    F: VectorFunction
    omega: ConstraintSet
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.F.dimension != self.omega.dimension:
            raise DataError(
                f"objectives on R^{self.F.dimension} with a constraint set in R^{self.omega.dimension}"
            )

    @property
    def dimension(self) -> int:
        return self.F.dimension

    @property
    def objective(self) -> VectorFunction:
        return self.F

    def feasible_mask(self, points: Matrix) -> np.ndarray:
        return self.omega.contains_many(points)


@dataclass(frozen=True)
class RegularizedProblem:
    """
    The base problem with every objective regularized by
    lam * ||x - center||^2 * weights_i, restricted to the level set
    D = omega & {F(x) <= F(center)}.

    """

    base: MOProblem
    center: Tuple[float, ...]
    lam: float
    weights: Tuple[float, ...]
    psi: VectorFunction = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        center = Point(self.center)
        object.__setattr__(self, "center", tuple(center))
        object.__setattr__(self, "weights", tuple(float(w) for w in np.atleast_1d(self.weights)))
        if not self.base.omega.contains(center):
            raise DomainError(f"prox center {center} lies outside the constraint set")
        psi = build_prox_objective(self.base.F, center, self.lam, self.weights)
        object.__setattr__(self, "psi", psi)

    @property
    def dimension(self) -> int:
        return self.base.dimension

    @property
    def omega(self) -> ConstraintSet:
        return self.base.omega

    @property
    def F(self) -> VectorFunction:
        return self.base.F

    @property
    def objective(self) -> VectorFunction:
        return self.psi

    @property
    def center_point(self) -> Vector:
        return np.asarray(self.center)

    @property
    def center_values(self) -> Vector:
        return self.base.F(self.center_point)

    def phi_many(self, points: Matrix) -> np.ndarray:
        """Phi = F - F(center), shape (N, m)."""
        return self.base.F.evaluate_many(points) - self.center_values

    def feasible_mask(self, points: Matrix) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        with np.errstate(invalid="ignore"):
            below = np.all(self.phi_many(X) <= LEVEL_TOL, axis=1)
        return self.omega.contains_many(X) & below

    def in_level_set(self, x: VectorLike) -> bool:
        return bool(self.feasible_mask(Point(x)[None, :])[0])


def dominates(a: VectorLike, b: VectorLike, tol: float = TIE_TOL) -> bool:
    """a is no worse than b everywhere and better somewhere, ties at `tol`."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.all(a <= b + tol) and np.any(a < b - tol))


@dataclass(frozen=True)
class ParetoResult:
    points: np.ndarray
    values: np.ndarray
    feasible: int

    def __len__(self) -> int:
        return len(self.points)

    def hull(self) -> Tuple[Vector, Vector]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def rows(self) -> List[JSONDict]:
        return [
            {"x": [float(c) for c in x], "F": [float(v) for v in fx]}
            for x, fx in zip(self.points, self.values)
        ]


def _evaluate_feasible(problem, X: np.ndarray, threads: int) -> Tuple[np.ndarray, np.ndarray]:
    chunks = [X[k:k + CHUNK] for k in range(0, len(X), CHUNK)]

    def run(chunk):
        values = problem.objective.evaluate_many(chunk)
        mask = problem.feasible_mask(chunk) & np.all(np.isfinite(values), axis=1)
        return chunk[mask], values[mask]

    parts = ordered_map(run, chunks, threads)
    m = len(problem.objective)
    points = np.vstack([p for p, _ in parts]) if parts else np.zeros((0, X.shape[1]))
    values = np.vstack([v for _, v in parts]) if parts else np.zeros((0, m))
    return points, values


def _nondominated(values: np.ndarray) -> np.ndarray:
    # lexicographic sweep: later points can never dominate earlier ones
    order = np.lexsort(values.T[::-1])
    front_idx: List[int] = []
    front = np.zeros((0, values.shape[1]))
    for k in order:
        v = values[k]
        if len(front):
            no_worse = np.all(front <= v + TIE_TOL, axis=1)
            better = np.any(front < v - TIE_TOL, axis=1)
            if np.any(no_worse & better):
                continue
        front_idx.append(k)
        front = np.vstack([front, v[None, :]])
    return np.sort(np.asarray(front_idx, dtype=int))


def pareto_bruteforce(problem, grid: Grid, threads: int = 1) -> ParetoResult:
    """
    All feasible lattice points not dominated by another feasible lattice
    point. `problem` is anything with `objective` and `feasible_mask`, so
    a RegularizedProblem yields the Pareto lattice of (Psi, D).

    """
    logger.debug(f"pareto_bruteforce on {grid.size} lattice points")
    X = grid.points()
    points, values = _evaluate_feasible(problem, X, threads)
    if len(points) == 0:
        return ParetoResult(points, values, 0)
    keep = _nondominated(values)
    return ParetoResult(points[keep], values[keep], len(points))


def is_pareto_point(problem, x: VectorLike, grid: Grid) -> bool:
    """Whether no feasible lattice point dominates x."""
    x = Point(x)
    if not problem.feasible_mask(x[None, :])[0]:
        return False
    fx = problem.objective(x)
    points, values = _evaluate_feasible(problem, grid.points(), 1)
    if len(values) == 0:
        return True
    no_worse = np.all(values <= fx + TIE_TOL, axis=1)
    better = np.any(values < fx - TIE_TOL, axis=1)
    return not bool(np.any(no_worse & better))


def _phi_gamma_many(rp: RegularizedProblem, xbar: Vector, gamma: float, X: np.ndarray) -> np.ndarray:
    if not gamma > 0:
        raise DataError(f"gamma must be positive, got {gamma}")
    psi_ref = rp.psi(xbar)
    with np.errstate(invalid="ignore"):
        shifted = rp.psi.evaluate_many(X) - psi_ref + gamma
        return np.max(np.maximum(shifted, rp.phi_many(X)), axis=1)


def phi_gamma(rp: RegularizedProblem, xbar: VectorLike, gamma: float, x: VectorLike) -> float:
    """max_i max(psi_i(x) - psi_i(xbar) + gamma, phi_i(x))."""
    return float(_phi_gamma_many(rp, Point(xbar), gamma, Point(x)[None, :])[0])


@dataclass(frozen=True)
class ScanResult:
    minimum: float
    argmin: Tuple[float, ...]
    positive: bool

    def to_dict(self) -> JSONDict:
        return {"minimum": self.minimum, "argmin": list(self.argmin), "positive": self.positive}


def phi_gamma_scan(rp: RegularizedProblem, xbar: VectorLike, gamma: float, grid: Grid) -> ScanResult:
    """Minimum of phi_gamma over omega intersected with the lattice."""
    logger.debug(f"phi_gamma_scan gamma={gamma} on {grid.size} points")
    X = grid.points()
    X = X[rp.omega.contains_many(X)]
    if len(X) == 0:
        raise DomainError("the lattice misses the constraint set")
    values = _phi_gamma_many(rp, Point(xbar), gamma, X)
    values[np.isnan(values)] = math.inf
    k = int(np.argmin(values))
    return ScanResult(float(values[k]), tuple(X[k]), bool(values[k] > 0))


def penalized_value(f: PiecewiseFunction, omega: ConstraintSet, tau: float, points: Matrix) -> np.ndarray:
    """f(x) + tau * d_omega(x) on a batch of points."""
    X = as_points(points, f.dimension)
    return f.evaluate_many(X) + tau * omega.distance_many(X)
