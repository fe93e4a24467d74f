import logging

import pytest

from proxpareto import DataError, InterfaceError, SessionConfig, connect
from proxpareto.corpus import CORPUS_DIR, load_case
from proxpareto.logging_utils import configure, logger, set_level
from proxpareto.runner import NEGATIVE, POSITIVE
from proxpareto.session import Session, get_count, get_flag, get_positive_float


@pytest.fixture
def runner():
    with connect() as session, session.runner() as runner:
        yield runner


def test_connect_applies_overrides():
    session = connect(seed=5, tol="1e-4", threads=None)
    assert session.config.seed == 5
    assert session.config.tol == pytest.approx(1e-4)
    assert session.config.threads == 1
    session.close()


def test_closed_session_refuses_work():
    session = Session()
    session.close()
    assert session.closed
    with pytest.raises(InterfaceError):
        session.runner()
    with pytest.raises(InterfaceError):
        _ = session.config


def test_context_manager_closes():
    with connect() as session:
        runner = session.runner()
        with runner:
            pass
        assert runner.closed
    assert session.closed
    with pytest.raises(InterfaceError):
        runner.fetchone()


def test_session_exposes_exception_types():
    with connect() as session:
        assert session.DataError is DataError
        assert issubclass(session.SchemaError, session.DataError)


@pytest.mark.parametrize(
    "value, ok",
    [("1e-6", 1e-6), (2, 2.0), (0.5, 0.5)],
)
def test_positive_float(value, ok):
    assert get_positive_float(value) == ok


@pytest.mark.parametrize("value", [0, -1.0, "abc", True, float("inf"), None])
def test_positive_float_rejects(value):
    with pytest.raises(DataError):
        get_positive_float(value)


def test_count_and_flag():
    assert get_count("4") == 4
    assert get_count(3.0) == 3
    with pytest.raises(DataError):
        get_count(2.5)
    with pytest.raises(DataError):
        get_count(0, minimum=1)
    assert get_flag("yes") and not get_flag("off") and get_flag(1)
    with pytest.raises(DataError):
        get_flag("maybe")
    with pytest.raises(DataError):
        SessionConfig(threads=0)


def test_fetching_rows(runner):
    runner.executefile(CORPUS_DIR / "scalar-quadratic.json")
    runner.execute("eval", point=[3.0])
    assert runner.description == ("function", "x", "value")
    assert runner.fetchone() == {"function": "f", "x": [3.0], "value": 9.0}
    assert runner.fetchone() is None
    assert runner.fetchmany() == []
    assert runner.report.verdict == POSITIVE
    assert runner.report.outputs == {"values": {"f": 9.0}}


def test_fetchmany_and_iteration(runner, kinked_pair):
    runner.execute("pareto", problem=kinked_pair, ranges=[[-3.0, 2.0]], step=0.25)
    runner.arraysize = 2
    first = runner.fetchmany()
    assert len(first) == 2
    rest = list(runner)
    assert len(first) + len(rest) == runner.report.outputs["count"]
    assert runner.fetchall() == []


def test_arraysize_must_be_positive(runner):
    assert runner.arraysize == 1
    with pytest.raises(InterfaceError):
        runner.arraysize = 0


def test_fetch_before_execute(runner):
    assert runner.description is None
    for fetch in (runner.fetchone, runner.fetchmany, runner.fetchall):
        with pytest.raises(InterfaceError):
            fetch()


def test_command_errors(runner):
    with pytest.raises(InterfaceError):
        runner.execute("optimize", problem=load_case("abs-prox"))
    with pytest.raises(InterfaceError):
        runner.execute("eval", point=[0.0])
    with pytest.raises(DataError):
        runner.execute("eval", problem=load_case("abs-prox"))


def test_negative_verdict(runner, abs_prox):
    with connect(paper_literal=True) as session, session.runner() as literal:
        literal.execute("certify", problem=abs_prox, point=[0.5])
        assert literal.report.verdict == NEGATIVE
    runner.execute("certify", problem=abs_prox, point=[0.5])
    row = runner.fetchone()
    assert row["verdict"] == "feasible"
    assert runner.report.verdict == POSITIVE


def test_report_digest_tracks_inputs(runner, scalar_quadratic):
    runner.execute("eval", problem=scalar_quadratic, point=[3.0])
    first = runner.report.inputs_digest
    runner.execute("eval", problem=scalar_quadratic, point=[3.0])
    assert runner.report.inputs_digest == first
    runner.execute("eval", problem=scalar_quadratic, point=[2.0])
    assert runner.report.inputs_digest != first


def test_subdiff_and_dirlip_commands(runner, kinked_pair):
    runner.execute("subdiff", problem=kinked_pair, point=[0.0], function="f2")
    rows = {r["kind"]: r["set"] for r in runner.fetchall()}
    assert rows["singular"] == "[0, inf)"
    assert rows["clarke"] is None

    runner.execute("dirlip", problem=kinked_pair, point=[0.0], function="f2", direction=[-1.0])
    assert runner.report.verdict == POSITIVE
    assert [r["level"] for r in runner.fetchall()] == [1, 2, 3, 4, 5, 6]


def test_regularize_and_penalty_commands(runner, abs_prox):
    runner.execute("regularize", problem=abs_prox)
    row = runner.fetchone()
    assert row["psi_at_center"] == pytest.approx(row["f_at_center"])

    runner.execute("penalty", problem=load_case("abs-on-interval"), point=[1.0], tau=2.0)
    assert runner.report.verdict == POSITIVE
    with pytest.raises(DataError):
        runner.execute("penalty", problem=abs_prox, point=[0.5])


def test_logger_configuration_is_idempotent(monkeypatch):
    monkeypatch.setenv("PROXPARETO_LOGLEVEL", "info")
    try:
        configure()
        configure()
        assert sum(getattr(h, "_proxpareto", False) for h in logger.handlers) == 1
        assert logger.level == logging.INFO
        assert set_level("loud") == logging.WARNING
    finally:
        set_level("WARNING")
