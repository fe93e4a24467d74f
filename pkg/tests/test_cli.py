import json
import logging

import pytest

from proxpareto import DataError
from proxpareto.cli import EXIT_INVALID, EXIT_NEGATIVE, EXIT_OK, EXIT_PRECONDITION, build_parser, format_table, main
from proxpareto.logging_utils import logger, set_level
from proxpareto.reports import RunReport

CUBE_ROOT = {
    "version": 1,
    "name": "cube-root-prox",
    "dimension": 1,
    "functions": {"f": {"pieces": [{"guard": [], "body": {"op": "pow", "base": {"op": "var"}, "exponent": "1/3"}}]}},
    "regularization": {"center": [1], "lam": 1, "weights": [1]},
}


def test_eval_prints_a_table(capsys):
    assert main(["eval", "scalar-quadratic", "--point", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "value" in out.splitlines()[0]
    assert "9" in out
    assert "verdict: ok" in out


def test_subdiff_singular_set(capsys):
    assert main(["subdiff", "kinked-pair", "--function", "f2", "--point", "0"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[0, inf)" in out


def test_pareto_with_negative_range(capsys):
    assert main(["pareto", "kinked-pair", "--range=-3:2", "--grid-step", "0.25", "--json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["outputs"]["hull"] == [[-1.0], [-0.5]]
    assert report["command"] == "pareto"


def test_printed_convention_is_a_negative_verdict(capsys):
    assert main(["certify", "abs-prox", "--point", "0.5", "--paper-literal"]) == EXIT_NEGATIVE
    assert "no certificate found" in capsys.readouterr().out
    assert main(["certify", "abs-prox", "--point", "0.5"]) == EXIT_OK


def test_precondition_failure(tmp_path, capsys):
    path = tmp_path / "cube.json"
    path.write_text(json.dumps(CUBE_ROOT))
    assert main(["certify", str(path), "--point", "0"]) == EXIT_PRECONDITION
    assert "precondition failed" in capsys.readouterr().err


def test_invalid_inputs(tmp_path, capsys):
    assert main(["eval", "no-such-case", "--point", "0"]) == EXIT_INVALID
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["eval", str(broken), "--point", "0"]) == EXIT_INVALID
    assert main(["certify", "abs-prox", "--point", "3"]) == EXIT_INVALID
    assert "error:" in capsys.readouterr().err


def test_report_file(tmp_path, capsys):
    out = tmp_path / "runs" / "eval.json"
    assert main(["eval", "scalar-quadratic", "--point", "2", "--out", str(out), "--seed", "4"]) == EXIT_OK
    report = RunReport.read(out)
    assert report.seed == 4
    assert report.outputs == {"values": {"f": 4.0}}
    capsys.readouterr()


def test_dirlip_negative_verdict(capsys):
    assert main(["dirlip", "kinked-pair", "--function", "f2", "--point", "0", "--direction", "1"]) == EXIT_NEGATIVE
    capsys.readouterr()


def test_parser_rejects_malformed_values():
    parser = build_parser()
    with pytest.raises(DataError):
        parser.parse_args(["eval", "abs-prox", "--point", "a,b"])
    with pytest.raises(DataError):
        parser.parse_args(["pareto", "abs-prox", "--range", "0"])
    args = parser.parse_args(["pareto", "abs-prox", "--range=-1:1", "--range=0:2"])
    assert args.ranges == [[-1.0, 1.0], [0.0, 2.0]]


def test_format_table():
    text = format_table(("x", "value"), [{"x": [1.0], "value": 0.333333333}])
    lines = text.splitlines()
    assert lines[0].split() == ["x", "value"]
    assert lines[2].split() == ["[1]", "0.333333"]


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "scalar-quadratic", "--point", "abc"],
        ["pareto", "kinked-pair", "--range", "0"],
        ["certify", "abs-prox"],
        ["integrate", "abs-prox"],
        [],
    ],
)
def test_malformed_command_lines_are_invalid_input(argv, capsys):
    assert main(argv) == EXIT_INVALID
    assert "error:" in capsys.readouterr().err


def test_log_level_option(capsys):
    try:
        assert main(["--log-level", "debug", "eval", "scalar-quadratic", "--point", "3"]) == EXIT_OK
        assert logger.level == logging.DEBUG
    finally:
        set_level("WARNING")
    capsys.readouterr()
    assert main(["--log-level", "chatty", "eval", "scalar-quadratic", "--point", "3"]) == EXIT_INVALID
