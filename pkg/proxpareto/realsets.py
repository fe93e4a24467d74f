"""
Finite unions of closed intervals and isolated points on the real line.

`RealSet1D` is the value type of every 1-D subdifferential. Instances are
immutable and always normalized: intervals are sorted, pairwise disjoint
and non-adjacent, and isolated points lie outside every interval.
Unbounded intervals use -inf/+inf endpoints.

"""
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .exceptions import DataError

__all__ = ["RealSet1D", "Piece", "minkowski_sum_all"]

INF = math.inf

# A convex piece of a set: (lo, hi) with lo == hi for isolated points.
Piece = Tuple[float, float]


def _clean(value: float) -> float:
    # -0.0 and 0.0 must compare and print the same.
    return float(value) + 0.0


def _format(value: float) -> str:
    if value == INF:
        return "inf"
    if value == -INF:
        return "-inf"
    return f"{value:.12g}"


def _encode(value: float):
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _decode(value) -> float:
    if isinstance(value, str):
        return float(value)
    return float(value)


@dataclass(frozen=True)
class RealSet1D:
    """
    A closed subset of R made of finitely many intervals and points.

    `approximate` marks sets that came out of a numeric fallback instead of
    exact calculus; it does not take part in equality.

    """

    intervals: Tuple[Piece, ...] = ()
    points: Tuple[float, ...] = ()
    approximate: bool = field(default=False, compare=False)

    def __post_init__(self):
        raw: List[Piece] = []
        for lo, hi in self.intervals:
            lo, hi = _clean(lo), _clean(hi)
            if math.isnan(lo) or math.isnan(hi):
                raise DataError("interval endpoints must not be NaN")
            if lo > hi:
                raise DataError(f"interval [{lo}, {hi}] has lo > hi")
            if lo == INF or hi == -INF:
                raise DataError("an interval cannot sit at infinity")
            raw.append((lo, hi))
        pts = []
        for p in self.points:
            p = _clean(p)
            if not math.isfinite(p):
                raise DataError(f"isolated point {p} must be finite")
            pts.append(p)

        # degenerate intervals are points
        proper = []
        for lo, hi in raw:
            if lo == hi:
                pts.append(lo)
            else:
                proper.append((lo, hi))

        proper.sort()
        merged: List[Piece] = []
        for lo, hi in proper:
            if merged and lo <= merged[-1][1]:
                prev_lo, prev_hi = merged[-1]
                merged[-1] = (prev_lo, max(prev_hi, hi))
            else:
                merged.append((lo, hi))

        kept = sorted(
            {p for p in pts if not any(lo <= p <= hi for lo, hi in merged)}
        )
        object.__setattr__(self, "intervals", tuple(merged))
        object.__setattr__(self, "points", tuple(kept))

    # constructors

    @classmethod
    def empty(cls) -> "RealSet1D":
        return cls()

    @classmethod
    def point(cls, value: float) -> "RealSet1D":
        return cls(points=(value,))

    @classmethod
    def of_points(cls, values: Iterable[float]) -> "RealSet1D":
        return cls(points=tuple(values))

    @classmethod
    def interval(cls, lo: float, hi: float) -> "RealSet1D":
        return cls(intervals=((lo, hi),))

    @classmethod
    def ray(cls, sign: int) -> "RealSet1D":
        """[0, inf) for sign > 0, (-inf, 0] for sign < 0."""
        return cls.interval(0.0, INF) if sign > 0 else cls.interval(-INF, 0.0)

    @classmethod
    def whole(cls) -> "RealSet1D":
        return cls.interval(-INF, INF)

    @classmethod
    def zero(cls) -> "RealSet1D":
        return cls.point(0.0)

    @classmethod
    def from_pieces(cls, pieces: Iterable[Piece], approximate: bool = False) -> "RealSet1D":
        return cls(intervals=tuple(pieces), approximate=approximate)

    # queries

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.points

    @property
    def infimum(self) -> float:
        if self.is_empty:
            return INF
        return min(p[0] for p in self.pieces())

    @property
    def supremum(self) -> float:
        if self.is_empty:
            return -INF
        return max(p[1] for p in self.pieces())

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.infimum) and math.isfinite(self.supremum) or self.is_empty

    @property
    def is_convex(self) -> bool:
        return len(self.pieces()) <= 1

    @property
    def is_zero(self) -> bool:
        return not self.intervals and self.points == (0.0,)

    def pieces(self) -> List[Piece]:
        """Convex pieces sorted left to right; points come as (p, p)."""
        out = list(self.intervals) + [(p, p) for p in self.points]
        out.sort()
        return out

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= value <= hi + tol for lo, hi in self.pieces())

    def __contains__(self, value: float) -> bool:
        return self.contains(value)

    def distance(self, value: float) -> float:
        """Euclidean distance from `value` to the set (inf when empty)."""
        best = INF
        for lo, hi in self.pieces():
            if value < lo:
                best = min(best, lo - value)
            elif value > hi:
                best = min(best, value - hi)
            else:
                return 0.0
        return best

    def nearest(self, value: float) -> Optional[float]:
        """A nearest element of the set, or None when empty."""
        best, best_d = None, INF
        for lo, hi in self.pieces():
            candidate = min(max(value, lo), hi)
            d = abs(candidate - value)
            if d < best_d:
                best, best_d = candidate, d
        return best

    # algebra

    def union(self, other: "RealSet1D") -> "RealSet1D":
        return RealSet1D(
            intervals=self.intervals + other.intervals,
            points=self.points + other.points,
            approximate=self.approximate or other.approximate,
        )

    __or__ = union

    def minkowski_sum(self, other: "RealSet1D") -> "RealSet1D":
        if self.is_empty or other.is_empty:
            return RealSet1D(approximate=self.approximate or other.approximate)
        pieces = []
        for a_lo, a_hi in self.pieces():
            for b_lo, b_hi in other.pieces():
                pieces.append((a_lo + b_lo, a_hi + b_hi))
        return RealSet1D.from_pieces(pieces, self.approximate or other.approximate)

    __add__ = minkowski_sum

    def scale(self, coefficient: float) -> "RealSet1D":
        if self.is_empty:
            return self
        if coefficient == 0:
            return RealSet1D.zero()
        pieces = []
        for lo, hi in self.pieces():
            a, b = coefficient * lo, coefficient * hi
            pieces.append((min(a, b), max(a, b)))
        return RealSet1D.from_pieces(pieces, self.approximate)

    def __mul__(self, coefficient: float) -> "RealSet1D":
        return self.scale(coefficient)

    __rmul__ = __mul__

    def __neg__(self) -> "RealSet1D":
        return self.scale(-1.0)

    def shift(self, offset: float) -> "RealSet1D":
        return self.minkowski_sum(RealSet1D.point(offset))

    def convex_hull(self) -> "RealSet1D":
        if self.is_empty:
            return self
        return RealSet1D(
            intervals=((self.infimum, self.supremum),), approximate=self.approximate
        )

    def recession_cone(self) -> "RealSet1D":
        """Directions along which the set is unbounded, as a cone."""
        if self.is_empty:
            return RealSet1D.zero()
        cone = RealSet1D.zero()
        if self.supremum == INF:
            cone = cone | RealSet1D.ray(+1)
        if self.infimum == -INF:
            cone = cone | RealSet1D.ray(-1)
        return cone

    def clip(self, lo: float, hi: float) -> "RealSet1D":
        """Intersection with the closed interval [lo, hi]."""
        pieces = []
        for a, b in self.pieces():
            c, d = max(a, lo), min(b, hi)
            if c <= d:
                pieces.append((c, d))
        return RealSet1D.from_pieces(pieces, self.approximate)

    def expand(self, radius: float) -> "RealSet1D":
        """Closed radius-neighbourhood of the set."""
        return RealSet1D.from_pieces(
            [(lo - radius, hi + radius) for lo, hi in self.pieces()], self.approximate
        )

    # comparisons

    def is_subset(self, other: "RealSet1D", tol: float = 0.0) -> bool:
        if self.is_empty:
            return True
        target = other.expand(tol) if tol > 0 else other
        return all(
            any(t_lo <= lo and hi <= t_hi for t_lo, t_hi in target.pieces())
            for lo, hi in self.pieces()
        )

    def _directed_hausdorff(self, other: "RealSet1D") -> float:
        target = other.pieces()
        gaps = [
            (target[k][1] + target[k + 1][0]) / 2.0 for k in range(len(target) - 1)
        ]
        worst = 0.0
        for lo, hi in self.pieces():
            candidates = [c for c in (lo, hi) if math.isfinite(c)]
            candidates += [g for g in gaps if lo <= g <= hi]
            for c in candidates:
                worst = max(worst, other.distance(c))
        return worst

    def hausdorff(self, other: "RealSet1D") -> float:
        """
        Hausdorff distance. Sets with different recession cones are at
        infinite distance; otherwise only the bounded geometry counts.

        """
        if self.is_empty or other.is_empty:
            return 0.0 if self.is_empty and other.is_empty else INF
        if self.recession_cone() != other.recession_cone():
            return INF
        return max(self._directed_hausdorff(other), other._directed_hausdorff(self))

    def isclose(self, other: "RealSet1D", tol: float = 1e-6) -> bool:
        return self.hausdorff(other) <= tol

    # presentation

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        parts = []
        for lo, hi in self.pieces():
            if lo == hi:
                parts.append("{" + _format(lo) + "}")
            else:
                left = "(" if lo == -INF else "["
                right = ")" if hi == INF else "]"
                parts.append(f"{left}{_format(lo)}, {_format(hi)}{right}")
        return " U ".join(parts)

    def to_dict(self) -> dict:
        return {
            "intervals": [[_encode(lo), _encode(hi)] for lo, hi in self.intervals],
            "points": list(self.points),
            "approximate": self.approximate,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RealSet1D":
        return cls(
            intervals=tuple(
                (_decode(lo), _decode(hi)) for lo, hi in data.get("intervals", [])
            ),
            points=tuple(float(p) for p in data.get("points", [])),
            approximate=bool(data.get("approximate", False)),
        )


def minkowski_sum_all(sets: Sequence[RealSet1D]) -> RealSet1D:
    """Minkowski sum of a nonempty sequence of sets."""
    if not sets:
        raise DataError("Minkowski sum of an empty list")
    total = sets[0]
    for s in sets[1:]:
        total = total + s
    return total
