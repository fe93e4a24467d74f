"""
JSON codec for expressions, piecewise functions, constraint sets and
problem files.

A problem file looks like

    {
      "version": 1,
      "name": "two-sided",
      "dimension": 1,
      "functions": {"f1": {"continuous": true, "pieces": [{"guard": [], "body": {...}}]}},
      "objectives": ["f1"],
      "constraint": {"kind": "box", "lower": [0], "upper": [1]},
      "regularization": {"center": [1], "lam": 1, "weights": [1]},
      "expected": {"pareto_hull": {"value": [0, 1], "source": "..."}}
    }

Expression nodes are tagged by "op" (see `Expr.to_dict`); "var" is an input
shorthand for a coordinate. Guards are lists of {"a", "b", "strict"} rows
meaning a.x <= b (< b when strict), or the shorthands {"ge"|"gt"|"le"|"lt":
value, "index": i}.

"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .exceptions import DataError, SchemaError
from .expressions import (
    Abs,
    Affine,
    Constant,
    Expr,
    Max,
    Min,
    Oscillatory,
    Power,
    Scale,
    Square,
    SquaredDistance,
    Sum,
)
from .functions import AffineInequality, Piece, PiecewiseFunction, VectorFunction
from .logging_utils import logger
from .problems import ConstraintSet, MOProblem, RegularizedProblem
from .type_constructors import Var
from .types_definitions import JSONDict

__all__ = [
    "SCHEMA_VERSION",
    "Regularization",
    "ProblemFile",
    "expr_from_dict",
    "function_to_dict",
    "function_from_dict",
    "constraint_from_dict",
    "load_problem",
    "loads_problem",
]

SCHEMA_VERSION = 1

_GUARD_SHORTHANDS = {
    "ge": (AffineInequality.lower, False),
    "gt": (AffineInequality.lower, True),
    "le": (AffineInequality.upper, False),
    "lt": (AffineInequality.upper, True),
}


def _require(data: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(data, Mapping):
        raise SchemaError(f"{where}: expected an object, got {type(data).__name__}")
    if key not in data:
        raise SchemaError(f"{where}: missing key {key!r}")
    return data[key]


def _floats(values: Any, where: str) -> Tuple[float, ...]:
    try:
        out = tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: expected numbers, got {values!r}") from exc
    return out


def _children(data: Mapping[str, Any], dimension: int, where: str) -> Tuple[Expr, ...]:
    args = _require(data, "args", where)
    if not isinstance(args, list) or not args:
        raise SchemaError(f"{where}: 'args' must be a nonempty list")
    return tuple(expr_from_dict(a, dimension, f"{where}.args[{k}]") for k, a in enumerate(args))


def expr_from_dict(data: Mapping[str, Any], dimension: int, where: str = "body") -> Expr:
    op = _require(data, "op", where)
    try:
        if op == "const":
            return Constant(float(_require(data, "value", where)))
        if op == "var":
            return Var(int(data.get("index", 0)), dimension)
        if op == "affine":
            coef = _floats(_require(data, "coef", where), where)
            if len(coef) != dimension:
                raise SchemaError(f"{where}: {len(coef)} coefficients in dimension {dimension}")
            return Affine(coef, float(data.get("offset", 0.0)))
        if op == "pow":
            base = expr_from_dict(_require(data, "base", where), dimension, f"{where}.base")
            return Power(base, Fraction(str(_require(data, "exponent", where))))
        if op in ("abs", "square", "xsin"):
            arg = expr_from_dict(_require(data, "arg", where), dimension, f"{where}.arg")
            if op == "abs":
                return Abs(arg)
            if op == "square":
                return Square(arg)
            return Oscillatory(arg, int(data.get("order", 1)))
        if op == "sqdist":
            center = _floats(_require(data, "center", where), where)
            if len(center) != dimension:
                raise SchemaError(f"{where}: center of dimension {len(center)} in dimension {dimension}")
            return SquaredDistance(center)
        if op == "scale":
            arg = expr_from_dict(_require(data, "arg", where), dimension, f"{where}.arg")
            return Scale(float(_require(data, "coef", where)), arg)
        if op == "sum":
            return Sum(_children(data, dimension, where))
        if op == "max":
            return Max(_children(data, dimension, where))
        if op == "min":
            return Min(_children(data, dimension, where))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"{where}: {exc}") from exc
    raise SchemaError(f"{where}: unknown op {op!r}")


def _guard_from_list(rows: Any, dimension: int, where: str) -> Tuple[AffineInequality, ...]:
    if not isinstance(rows, list):
        raise SchemaError(f"{where}: a guard is a list of inequalities")
    out = []
    for k, row in enumerate(rows):
        here = f"{where}[{k}]"
        if not isinstance(row, Mapping):
            raise SchemaError(f"{here}: expected an object")
        shorthand = [key for key in _GUARD_SHORTHANDS if key in row]
        if shorthand:
            make, strict = _GUARD_SHORTHANDS[shorthand[0]]
            index = int(row.get("index", 0))
            if not 0 <= index < dimension:
                raise SchemaError(f"{here}: coordinate {index} out of range")
            out.append(make(float(row[shorthand[0]]), index, dimension, strict))
            continue
        normal = _floats(_require(row, "a", here), here)
        if len(normal) != dimension:
            raise SchemaError(f"{here}: normal of dimension {len(normal)} in dimension {dimension}")
        out.append(AffineInequality(normal, float(_require(row, "b", here)), bool(row.get("strict", False))))
    return tuple(out)


def function_to_dict(f: PiecewiseFunction) -> JSONDict:
    return {
        "name": f.name,
        "continuous": f.continuous,
        "pieces": [
            {"guard": [g.to_dict() for g in p.guard], "body": p.body.to_dict()} for p in f.pieces
        ],
    }


def function_from_dict(data: Mapping[str, Any], dimension: int, name: str = "") -> PiecewiseFunction:
    where = f"functions.{name}" if name else "function"
    pieces_data = _require(data, "pieces", where)
    if not isinstance(pieces_data, list) or not pieces_data:
        raise SchemaError(f"{where}: 'pieces' must be a nonempty list")
    pieces = []
    for k, p in enumerate(pieces_data):
        here = f"{where}.pieces[{k}]"
        guard = _guard_from_list(p.get("guard", []) if isinstance(p, Mapping) else None, dimension, f"{here}.guard")
        body = expr_from_dict(_require(p, "body", here), dimension, f"{here}.body")
        pieces.append(Piece(guard, body))
    try:
        return PiecewiseFunction(
            dimension, tuple(pieces), bool(data.get("continuous", False)), data.get("name", name)
        )
    except DataError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def constraint_from_dict(data: Optional[Mapping[str, Any]], dimension: int) -> ConstraintSet:
    if data is None:
        return ConstraintSet.whole(dimension)
    kind = _require(data, "kind", "constraint")
    try:
        if kind == "whole":
            return ConstraintSet.whole(dimension)
        if kind == "box":
            omega = ConstraintSet.box(
                _floats(_require(data, "lower", "constraint"), "constraint.lower"),
                _floats(_require(data, "upper", "constraint"), "constraint.upper"),
            )
        elif kind == "polyhedron":
            omega = ConstraintSet.polyhedron(
                _require(data, "A", "constraint"),
                _require(data, "b", "constraint"),
                _require(data, "feasible_point", "constraint"),
            )
        else:
            raise SchemaError(f"constraint: unknown kind {kind!r}")
    except DataError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"constraint: {exc}") from exc
    if omega.dimension != dimension:
        raise SchemaError(f"constraint of dimension {omega.dimension} in a problem of dimension {dimension}")
    return omega


@dataclass(frozen=True)
class Regularization:
    center: Tuple[float, ...]
    lam: float
    weights: Tuple[float, ...]

    def to_dict(self) -> JSONDict:
        return {"center": list(self.center), "lam": self.lam, "weights": list(self.weights)}


@dataclass(frozen=True)
class ProblemFile:
    name: str
    dimension: int
    functions: Dict[str, PiecewiseFunction]
    objectives: Tuple[str, ...]
    omega: ConstraintSet
    regularization: Optional[Regularization] = None
    expected: Dict[str, Any] = field(default_factory=dict)
    version: int = SCHEMA_VERSION

    def function(self, key: Optional[str] = None) -> PiecewiseFunction:
        """The named function, or the first objective."""
        key = key or (self.objectives[0] if self.objectives else next(iter(self.functions)))
        try:
            return self.functions[key]
        except KeyError:
            raise DataError(f"problem {self.name!r} has no function {key!r}") from None

    @property
    def F(self) -> VectorFunction:
        return VectorFunction(tuple(self.functions[k] for k in self.objectives))

    def problem(self) -> MOProblem:
        return MOProblem(self.F, self.omega, self.name)

    def regularized(
        self,
        center: Optional[Any] = None,
        lam: Optional[float] = None,
        weights: Optional[Any] = None,
    ) -> RegularizedProblem:
        """The regularized problem, file values overridden by arguments."""
        base = self.regularization
        if base is None and (center is None or lam is None or weights is None):
            raise DataError(f"problem {self.name!r} has no regularization block; pass center, lam and weights")
        center = base.center if center is None else center
        lam = base.lam if lam is None else lam
        weights = base.weights if weights is None else weights
        return RegularizedProblem(self.problem(), tuple(np.atleast_1d(center)), float(lam),
                                  tuple(np.atleast_1d(weights)))

    def expectation(self, key: str, default: Any = None) -> Any:
        entry = self.expected.get(key)
        return default if entry is None else entry["value"]

    def to_dict(self) -> JSONDict:
        data: JSONDict = {
            "version": self.version,
            "name": self.name,
            "dimension": self.dimension,
            "functions": {k: function_to_dict(f) for k, f in self.functions.items()},
            "objectives": list(self.objectives),
            "constraint": self.omega.to_dict(),
        }
        if self.regularization is not None:
            data["regularization"] = self.regularization.to_dict()
        if self.expected:
            data["expected"] = self.expected
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProblemFile":
        version = _require(data, "version", "problem")
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported problem file version {version!r}, expected {SCHEMA_VERSION}")
        name = str(data.get("name", ""))
        dimension = _require(data, "dimension", "problem")
        if not isinstance(dimension, int) or dimension < 1:
            raise SchemaError(f"problem: dimension must be a positive integer, got {dimension!r}")
        raw = _require(data, "functions", "problem")
        if not isinstance(raw, Mapping) or not raw:
            raise SchemaError("problem: 'functions' must be a nonempty object")
        functions = {str(k): function_from_dict(v, dimension, str(k)) for k, v in raw.items()}
        objectives = tuple(str(k) for k in data.get("objectives", list(functions)))
        missing = [k for k in objectives if k not in functions]
        if missing:
            raise SchemaError(f"problem: objectives reference unknown functions {missing}")
        omega = constraint_from_dict(data.get("constraint"), dimension)

        regularization = None
        if data.get("regularization") is not None:
            block = data["regularization"]
            regularization = Regularization(
                _floats(_require(block, "center", "regularization"), "regularization.center"),
                float(_require(block, "lam", "regularization")),
                _floats(_require(block, "weights", "regularization"), "regularization.weights"),
            )

        expected = dict(data.get("expected", {}))
        for key, entry in expected.items():
            if not isinstance(entry, Mapping) or "value" not in entry or not entry.get("source"):
                raise SchemaError(f"expected.{key}: entries need a 'value' and a 'source'")
        return cls(name, dimension, functions, objectives, omega, regularization, expected, version)


def loads_problem(text: str) -> ProblemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"problem file is not valid JSON: {exc}") from exc
    return ProblemFile.from_dict(data)


def load_problem(path: Union[str, Path]) -> ProblemFile:
    path = Path(path)
    logger.debug(f"load_problem {path}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read problem file {path}: {exc}") from exc
    return loads_problem(text)
