import json

import numpy as np
import pytest

from proxpareto import SchemaError, load_problem, loads_problem
from proxpareto.corpus import CORPUS_DIR, corpus_names
from proxpareto.serialization import constraint_from_dict, expr_from_dict, function_from_dict

TWO_SIDED = {
    "version": 1,
    "name": "two-sided",
    "dimension": 1,
    "functions": {
        "f1": {
            "continuous": True,
            "pieces": [
                {"guard": [{"gt": 0}], "body": {"op": "pow", "base": {"op": "var"}, "exponent": "1/3"}},
                {"guard": [{"le": 0}], "body": {"op": "scale", "coef": -1, "arg": {"op": "var"}}},
            ],
        },
        "f2": {"pieces": [{"guard": [], "body": {"op": "sqdist", "center": [1]}}]},
    },
    "objectives": ["f1", "f2"],
    "constraint": {"kind": "box", "lower": [-2], "upper": [2]},
    "regularization": {"center": [0.5], "lam": 1, "weights": [0.6, 0.8]},
    "expected": {"value": {"check": "eval", "value": {"point": [8], "result": 2}, "source": "cube root of 8"}},
}


def variant(**changes):
    data = json.loads(json.dumps(TWO_SIDED))
    data.update(changes)
    return json.dumps(data)


def test_loads_problem():
    pf = loads_problem(json.dumps(TWO_SIDED))
    assert pf.name == "two-sided"
    assert pf.objectives == ("f1", "f2")
    assert pf.function()(8.0) == pytest.approx(2.0)
    assert pf.function("f1")(-3.0) == pytest.approx(3.0)
    assert pf.function("f2")(3.0) == pytest.approx(4.0)
    assert pf.omega.kind == "box"
    assert pf.regularization.weights == (0.6, 0.8)
    assert pf.expectation("value") == {"point": [8], "result": 2}
    assert pf.expectation("missing", 0) == 0
    np.testing.assert_allclose(pf.F([0.0]), [0.0, 1.0])


def test_dumps_is_stable():
    pf = loads_problem(json.dumps(TWO_SIDED))
    text = pf.dumps()
    again = loads_problem(text)
    assert again.dumps() == text
    for x in (-1.5, 0.0, 0.7):
        np.testing.assert_allclose(again.F([x]), pf.F([x]))


def test_regularized_overrides(quadratic_pair):
    rp = quadratic_pair.regularized(center=[0.5])
    assert rp.center == (0.5,)
    assert rp.lam == quadratic_pair.regularization.lam


@pytest.mark.parametrize(
    "changes",
    [
        {"version": 2},
        {"dimension": 0},
        {"functions": {}},
        {"objectives": ["f1", "g"]},
        {"constraint": {"kind": "ellipse"}},
        {"constraint": {"kind": "box", "lower": [0, 0], "upper": [1, 1]}},
        {"constraint": {"kind": "box", "lower": [1], "upper": [0]}},
        {"expected": {"value": {"value": 1}}},
        {"regularization": {"center": [0.5], "lam": 1}},
    ],
)
def test_schema_errors(changes):
    with pytest.raises(SchemaError):
        loads_problem(variant(**changes))


def test_bad_json_text():
    with pytest.raises(SchemaError):
        loads_problem("{not json")


def test_missing_file(tmp_path):
    with pytest.raises(SchemaError):
        load_problem(tmp_path / "absent.json")


@pytest.mark.parametrize(
    "body",
    [
        {"op": "tan", "arg": {"op": "var"}},
        {"op": "pow", "base": {"op": "var"}, "exponent": "1/0"},
        {"op": "affine", "coef": [1, 2]},
        {"op": "sum", "args": []},
        {"value": 1},
        {"op": "scale", "coef": "two", "arg": {"op": "var"}},
    ],
)
def test_expression_errors(body):
    with pytest.raises(SchemaError):
        expr_from_dict(body, 1)


def test_guard_errors():
    with pytest.raises(SchemaError):
        function_from_dict({"pieces": [{"guard": [{"ge": 0, "index": 3}], "body": {"op": "var"}}]}, 1)
    with pytest.raises(SchemaError):
        function_from_dict({"pieces": [{"guard": {"ge": 0}, "body": {"op": "var"}}]}, 1)
    with pytest.raises(SchemaError):
        function_from_dict({"pieces": []}, 1)


def test_expression_codec_matches_to_dict():
    body = {
        "op": "max",
        "args": [
            {"op": "abs", "arg": {"op": "affine", "coef": [1.0, -1.0], "offset": 0.5}},
            {"op": "square", "arg": {"op": "var", "index": 1}},
        ],
    }
    expr = expr_from_dict(body, 2)
    assert expr_from_dict(expr.to_dict(), 2).to_dict() == expr.to_dict()
    assert expr.evaluate([1.0, 2.0]) == pytest.approx(4.0)


def test_constraint_defaults_to_whole_space():
    assert constraint_from_dict(None, 2).kind == "whole"
    polyhedron = constraint_from_dict({"kind": "polyhedron", "A": [[1, 1]], "b": [1], "feasible_point": [0, 0]}, 2)
    assert polyhedron.contains([0.5, 0.5])
    assert not polyhedron.contains([1.0, 1.0])


def test_every_bundled_case_loads():
    names = corpus_names()
    assert "kinked-pair" in names and "scalar-quadratic" in names
    for name in names:
        pf = load_problem(CORPUS_DIR / f"{name}.json")
        assert pf.name == name
        assert all(entry["source"] for entry in pf.expected.values())
