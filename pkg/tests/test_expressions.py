from fractions import Fraction

import numpy as np
import pytest

from proxpareto import DataError, UnsupportedAtomError
from proxpareto.expressions import (
    Abs,
    Affine,
    Constant,
    Max,
    Min,
    Oscillatory,
    Power,
    Scale,
    Square,
    Sum,
    kink_points,
    resolve_branches,
    split_separable,
)
from proxpareto.series import signed_power
from proxpareto.type_constructors import Const, Dist2, Root, Var


def test_signed_cube_root_is_odd():
    cbrt = Root(Var(), "1/3")
    xs = np.array([[-8.0], [-1.0], [0.0], [1.0], [8.0]])
    np.testing.assert_allclose(cbrt.evaluate_many(xs), [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert signed_power(-27.0, Fraction(1, 3)) == pytest.approx(-3.0)


def test_even_root_is_undefined_on_negatives():
    root = Power(Var(), Fraction(1, 2))
    values = root.evaluate_many(np.array([[-1.0], [4.0]]))
    assert np.isnan(values[0])
    assert values[1] == pytest.approx(2.0)


def test_even_numerator_gives_even_function():
    two_thirds = Root(Var(), "2/3")
    assert two_thirds.evaluate(np.array([-8.0])) == pytest.approx(4.0)


def test_oscillatory_atom_vanishes_at_zero():
    osc = Oscillatory(Var(), 1)
    values = osc.evaluate_many(np.array([[0.0], [1.0 / np.pi]]))
    assert values[0] == 0.0
    assert values[1] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DataError):
        Oscillatory(Var(), 3)


def test_gradients():
    body = Sum((Square(Var()), Scale(3.0, Var())))
    np.testing.assert_allclose(body.gradient(np.array([2.0])), [7.0])
    with pytest.raises(UnsupportedAtomError):
        Root(Var(), "1/3").gradient(np.array([0.0]))
    with pytest.raises(UnsupportedAtomError):
        Max((Var(), Scale(-1.0, Var()))).gradient(np.array([0.0]))


def test_squared_distance():
    body = Dist2([1.0, -1.0])
    assert body.evaluate(np.array([2.0, 1.0])) == pytest.approx(5.0)
    np.testing.assert_allclose(body.gradient(np.array([2.0, 1.0])), [2.0, 4.0])


def test_kink_points_of_abs_and_extrema():
    assert kink_points(Abs(Affine((1.0,), -2.0)), -10, 10) == [2.0]
    kinks = kink_points(Max((Var(), Scale(-1.0, Var()))), -1, 1)
    assert kinks == [0.0]
    assert kink_points(Min((Square(Var()), Constant(1.0))), -5, 5) == pytest.approx([-1.0, 1.0])


def test_resolve_branches_picks_active_branch():
    body = Abs(Var())
    assert resolve_branches(body, 0.0, 1.0) == Var()
    assert resolve_branches(body, -1.0, 0.0) == Scale(-1.0, Var())


def test_split_separable():
    body = Sum((Root(Var(0, 2), "1/3"), Root(Var(1, 2), "1/3"), Constant(2.0)))
    constant, terms = split_separable(body)
    assert constant == 2.0
    assert sorted(terms) == [0, 1]
    coupled = Square(Affine((1.0, 1.0)))
    assert split_separable(coupled) is None


def test_dict_form():
    body = Root(Abs(Var()), "1/3")
    assert body.to_dict() == {
        "op": "pow",
        "base": {"op": "abs", "arg": {"op": "affine", "coef": [1.0], "offset": 0.0}},
        "exponent": "1/3",
    }


def test_constant_constructor():
    c = Const(2.5)
    assert c == Constant(2.5)
    assert c.evaluate([7.0]) == 2.5
    assert kink_points(c, -1.0, 1.0) == []


@pytest.mark.parametrize("exponent", ["1/3", "1/5", "3/5"])
def test_odd_roots_are_odd_functions(exponent):
    root = Root(Var(), exponent)
    xs = np.random.default_rng(0).uniform(-10.0, 10.0, size=(1000, 1))
    np.testing.assert_allclose(root.evaluate_many(-xs), -root.evaluate_many(xs), rtol=1e-12)
