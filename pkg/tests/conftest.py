from fractions import Fraction

import pytest

from proxpareto import (
    ConstraintSet,
    MOProblem,
    PiecewiseFunction,
    VectorFunction,
)
from proxpareto.corpus import load_case
from proxpareto.expressions import Abs, Oscillatory, Scale, Square
from proxpareto.functions import AffineInequality, Piece
from proxpareto.type_constructors import Root, Var


def one_piece(body, name=""):
    return PiecewiseFunction.single(body, 1, name)


def two_pieces(right, left, name="", continuous=True):
    """`right` on x > 0, `left` on x <= 0."""
    return PiecewiseFunction(
        1,
        (
            Piece((AffineInequality.lower(0.0, strict=True),), right),
            Piece((AffineInequality.upper(0.0),), left),
        ),
        continuous,
        name,
    )


@pytest.fixture
def cube_root():
    return one_piece(Root(Var(), Fraction(1, 3)), "cbrt")


@pytest.fixture
def absolute():
    return one_piece(Abs(Var()), "abs")


@pytest.fixture
def square():
    return one_piece(Square(Var()), "square")


@pytest.fixture
def oscillating():
    return two_pieces(Scale(0.5, Oscillatory(Var(), 1)), Scale(-1.0, Var()), "osc")


@pytest.fixture
def quadratic_pair():
    return load_case("quadratic-pair")


@pytest.fixture
def kinked_pair():
    return load_case("kinked-pair")


@pytest.fixture
def abs_prox():
    return load_case("abs-prox")


@pytest.fixture
def scalar_quadratic():
    return load_case("scalar-quadratic")


@pytest.fixture
def whole_line():
    return ConstraintSet.whole(1)


@pytest.fixture
def square_problem(square, whole_line):
    return MOProblem(VectorFunction((square,)), whole_line)
