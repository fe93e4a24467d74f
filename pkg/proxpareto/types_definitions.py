"""
Type aliases shared across the toolkit.

"""
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "Vector",
    "VectorLike",
    "Matrix",
    "ExtendedReal",
    "Side",
    "ResultRow",
    "ResultSet",
    "ColumnNames",
    "JSONDict",
]

# A point or direction in R^n, always a 1-D float array internally.
Vector = np.ndarray
# Anything `np.asarray(..., dtype=float)` accepts as a point.
VectorLike = Union[Sequence[float], np.ndarray, float]
# A batch of points, shape (N, n).
Matrix = np.ndarray

# A float that may be +inf or -inf.
ExtendedReal = float

# Side of a 1-D point: -1 for the left, +1 for the right.
Side = int

# One row of command output, keyed by column name.
ResultRow = Dict[str, Any]
# A sequence of result rows - the full set or part of a set.
ResultSet = Sequence[ResultRow]
# Column names of a result set.
ColumnNames = Tuple[str, ...]

# Decoded JSON object.
JSONDict = Dict[str, Any]
