"""
One-sided expansions of 1-D expressions.

Near a point x0 and on a side s in {-1, +1}, every supported expression
behaves like a finite sum of rational powers of h = |y - x0|:

    g(x0 + s*h) = sum_k c_k * h**e_k  (+ an oscillating term),   h -> 0+

`Series` holds that sum truncated at `ORDER`, together with the exponent
up to which the truncation is exact (`precision`). Exact 1-D calculus only
needs the terms of exponent <= 1 and the leading term's sign, so the
truncation is kept small.

"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from .exceptions import UnsupportedAtomError

__all__ = ["ORDER", "Oscillation", "Series", "signed_power"]

ORDER = Fraction(3)

Exponent = Fraction
Precision = Union[Fraction, float]


def signed_power(base: float, exponent: Fraction) -> float:
    """
    Real power with the signed root for odd denominators; NaN when an even
    denominator meets a negative base.

    """
    if base >= 0:
        return base ** float(exponent)
    if exponent.denominator % 2 == 0:
        return math.nan
    magnitude = (-base) ** float(exponent)
    return -magnitude if exponent.numerator % 2 else magnitude


def _binomial(r: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out = out * (r - j) / (j + 1)
    return out


@dataclass(frozen=True)
class Oscillation:
    """
    The term A * h**order * sin(1/(b*h)) up to sign. `value_amp` bounds
    its size as a multiple of h**order, `slope_amp` bounds the amplitude of
    its derivative (inf when the derivative is unbounded).

    """

    order: int
    value_amp: float
    slope_amp: float

    def scaled(self, factor: float) -> "Oscillation":
        k = abs(factor)
        return Oscillation(self.order, self.value_amp * k, self.slope_amp * k)


@dataclass(frozen=True)
class Series:
    """Truncated one-sided expansion; see the module docstring."""

    terms: Tuple[Tuple[Exponent, float], ...] = ()
    precision: Precision = math.inf
    oscillation: Optional[Oscillation] = None
    outside: bool = False

    @classmethod
    def build(
        cls,
        mapping: Dict[Exponent, float],
        precision: Precision = math.inf,
        oscillation: Optional[Oscillation] = None,
    ) -> "Series":
        limit = min(precision, ORDER)
        if any(e > ORDER for e in mapping):
            precision = min(precision, ORDER)
        terms = tuple(
            sorted((Fraction(e), float(c)) for e, c in mapping.items() if c != 0 and e <= limit)
        )
        return cls(terms=terms, precision=precision, oscillation=oscillation)

    @classmethod
    def constant(cls, value: float) -> "Series":
        return cls.build({Fraction(0): value})

    @classmethod
    def off_domain(cls) -> "Series":
        return cls(outside=True)

    # inspection

    def as_dict(self) -> Dict[Exponent, float]:
        return dict(self.terms)

    @property
    def value(self) -> float:
        return self.as_dict().get(Fraction(0), 0.0)

    def increment(self) -> "Series":
        """The series minus its value: only positive exponents remain."""
        return Series(
            terms=tuple((e, c) for e, c in self.terms if e > 0),
            precision=self.precision,
            oscillation=self.oscillation,
            outside=self.outside,
        )

    def leading(self) -> Optional[Tuple[Exponent, float]]:
        """Lowest-exponent positive term that the precision certifies."""
        for e, c in self.terms:
            if e > 0 and e < self.precision:
                return e, c
        return None

    def sign(self) -> int:
        """Sign of g near the point on this side."""
        if self.oscillation is not None:
            raise UnsupportedAtomError("sign of an oscillating expansion")
        for e, c in self.terms:
            if e < self.precision:
                return 1 if c > 0 else -1
            break
        if self.precision == math.inf:
            return 0
        raise UnsupportedAtomError("expansion too short to decide a sign")

    def _require_plain(self, what: str):
        if self.oscillation is not None:
            raise UnsupportedAtomError(f"{what} of an oscillating expansion")

    # algebra

    def __add__(self, other: "Series") -> "Series":
        if self.outside or other.outside:
            return Series.off_domain()
        if self.oscillation is not None and other.oscillation is not None:
            raise UnsupportedAtomError("sum of two oscillating expansions")
        mapping = self.as_dict()
        for e, c in other.terms:
            mapping[e] = mapping.get(e, 0.0) + c
        return Series.build(
            mapping,
            min(self.precision, other.precision),
            self.oscillation or other.oscillation,
        )

    def scale(self, factor: float) -> "Series":
        if self.outside:
            return self
        if factor == 0:
            return Series.constant(0.0)
        osc = self.oscillation.scaled(factor) if self.oscillation else None
        return Series.build(
            {e: factor * c for e, c in self.terms}, self.precision, osc
        )

    def __neg__(self) -> "Series":
        return self.scale(-1.0)

    def _lowest(self) -> Exponent:
        return self.terms[0][0] if self.terms else Fraction(0)

    def __mul__(self, other: "Series") -> "Series":
        if self.outside or other.outside:
            return Series.off_domain()
        self._require_plain("product")
        other._require_plain("product")
        mapping: Dict[Exponent, float] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                if e1 + e2 <= ORDER:
                    mapping[e1 + e2] = mapping.get(e1 + e2, 0.0) + c1 * c2
        precision = min(
            self.precision + other._lowest(), other.precision + self._lowest()
        )
        return Series.build(mapping, min(precision, ORDER))

    def power(self, exponent: Fraction) -> "Series":
        """Real power g**r with the signed root for odd denominators."""
        if self.outside:
            return self
        self._require_plain("power")
        r = Fraction(exponent)
        c0 = self.value
        if c0 != 0:
            base = signed_power(c0, r)
            if math.isnan(base):
                return Series.off_domain()
            w = self.increment().scale(1.0 / c0)
            return w._binomial_series(r).scale(base)
        lead = self.leading()
        if lead is None:
            if self.precision == math.inf and r > 0:
                return Series.constant(0.0)
            raise UnsupportedAtomError("power of an expansion with no leading term")
        if r <= 0:
            return Series.off_domain()
        e, c = lead
        base = signed_power(c, r)
        if math.isnan(base):
            return Series.off_domain()
        w = Series.build(
            {ek - e: ck / c for ek, ck in self.terms if ek > e},
            self.precision - e,
        )
        core = w._binomial_series(r).scale(base)
        shifted = {ek + e * r: ck for ek, ck in core.terms}
        return Series.build(shifted, min(core.precision + e * r, ORDER))

    def _binomial_series(self, r: Fraction) -> "Series":
        # (1 + w)**r for w with positive exponents only
        if not self.terms:
            return Series.build({Fraction(0): 1.0}, self.precision)
        e_min = self.terms[0][0]
        result = Series.constant(1.0)
        power = Series.constant(1.0)
        k = 1
        while k * e_min <= ORDER:
            power = power * self
            coefficient = float(_binomial(r, k))
            if coefficient != 0:
                result = result + power.scale(coefficient)
            k += 1
        return Series.build(result.as_dict(), min(self.precision, ORDER))

    def absolute(self) -> "Series":
        if self.outside:
            return self
        self._require_plain("absolute value")
        return self.scale(-1.0) if self.sign() < 0 else self

    def compare(self, other: "Series") -> int:
        """Sign of self - other near the point (0 when indistinguishable)."""
        return (self + (-other)).sign()

    # one-sided calculus

    def _check_first_order(self):
        if self.leading_below_one() is None and self.precision <= 1:
            raise UnsupportedAtomError("expansion does not resolve first order terms")

    def leading_below_one(self) -> Optional[Tuple[Exponent, float]]:
        lead = self.leading()
        if lead is not None and lead[0] < 1:
            return lead
        return None

    def linear_coefficient(self) -> float:
        return self.as_dict().get(Fraction(1), 0.0)

    def dini_slope(self) -> float:
        """
        lim (g(x0 + s*h) - g_value) / h along the side, in extended reals,
        ignoring any oscillation.

        """
        self._check_first_order()
        lead = self.leading_below_one()
        if lead is not None:
            return math.copysign(math.inf, lead[1])
        return self.linear_coefficient()
