"""
Constructors for the value types the toolkit works with, returning the
concrete Python types used internally. Points are float arrays; the rest
build expression nodes and guards.

"""
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .exceptions import DataError
from .expressions import Affine, Constant, Expr, Power, SquaredDistance
from .realsets import RealSet1D
from .types_definitions import Vector, VectorLike

__all__ = [
    "Point",
    "Var",
    "Const",
    "Root",
    "Dist2",
    "Interval",
    "Ray",
    "NUMBER",
    "POINT",
    "SET",
]


def Point(coordinates: VectorLike) -> Vector:  # pylint: disable=invalid-name
    """Return a finite 1-D float array."""
    x = np.atleast_1d(np.asarray(coordinates, dtype=float)).copy()
    if x.ndim != 1:
        raise DataError(f"a point must be a flat vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DataError(f"point {x} has non-finite entries")
    return x


def Var(index: int = 0, dimension: int = 1) -> Affine:  # pylint: disable=invalid-name
    """The coordinate x_index in R^dimension."""
    if not 0 <= index < dimension:
        raise DataError(f"coordinate {index} out of range for dimension {dimension}")
    coefficients = [0.0] * dimension
    coefficients[index] = 1.0
    return Affine(tuple(coefficients))


def Root(base: Expr, exponent: Union[Fraction, str, int]) -> Power:  # pylint: disable=invalid-name
    """base ** exponent with exponents given as fractions or strings like "1/3"."""
    return Power(base, Fraction(exponent))


def Dist2(center: VectorLike) -> SquaredDistance:  # pylint: disable=invalid-name
    return SquaredDistance(tuple(Point(center)))


Const = Constant
Interval = RealSet1D.interval
Ray = RealSet1D.ray

# Type definitions.
NUMBER = float
POINT = np.ndarray
SET = RealSet1D


def as_points(points: Sequence[VectorLike], dimension: int) -> np.ndarray:
    """Stack points into an (N, dimension) array."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if dimension == 1 and X.shape[0] == 1 and X.shape[1] != 1:
        X = X.T
    if X.shape[1] != dimension:
        raise DataError(f"points of dimension {X.shape[1]} where {dimension} was expected")
    return X
