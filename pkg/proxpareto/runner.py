"""
Runners execute toolkit commands against a problem and stream the result
rows, the way a DB-API cursor streams query results.

"""
import time
from dataclasses import asdict
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from . import __version__
from .certifier import CertificateOptions, certify_pareto, exact_penalty_check
from .contexts import ClosingContextMixin
from .corpus import selftest
from .dirlip import DLSchedule, analyze_direction, certify_dl
from .exceptions import DataError, InterfaceError
from .extensions import IterableRunnerMixin
from .logging_utils import logger
from .problems import Grid, pareto_bruteforce, phi_gamma_scan
from .reports import RunReport, digest
from .serialization import ProblemFile, load_problem
from .solver import SolverConfig, solve_ppa
from .subdifferentials import subdiff_report
from .type_constructors import Point
from .types_definitions import ColumnNames, ResultRow, ResultSet

__all__ = ["Runner", "check_closed", "COMMANDS", "POSITIVE", "NEGATIVE"]

POSITIVE = "ok"
NEGATIVE = "negative"


def check_closed(func):
    @wraps(func)
    def wrapped(self, *args, **kwargs):
        if self.closed:
            raise InterfaceError(f"{self.__class__.__name__} is closed")
        return func(self, *args, **kwargs)
    return wrapped


# A command returns (rows, outputs, verdict).
CommandResult = Tuple[List[ResultRow], Dict[str, Any], str]


class Runner(IterableRunnerMixin, ClosingContextMixin):
    """Executes commands for a session; one result set at a time."""

    def __init__(self, session):
        self._session = session
        self._problem: Optional[ProblemFile] = None
        self._arraysize = 1
        self._description: Optional[ColumnNames] = None
        self._iterator: Optional[Iterator[ResultRow]] = None
        self._report: Optional[RunReport] = None
        self._closed = False

    @property
    def config(self):
        return self._session.config

    @property
    def problem(self) -> Optional[ProblemFile]:
        return self._problem

    @check_closed
    def executefile(self, file_path: Union[str, Path]) -> ProblemFile:
        """Load a problem file; later commands run against it."""
        logger.debug(f"executefile {self.__class__.__name__} file '{file_path}'")
        self._problem = load_problem(file_path)
        return self._problem

    @check_closed
    def execute(self, command: str, **arguments: Any) -> Iterator[ResultRow]:
        """
        Run `command` with keyword arguments. `problem=` overrides the loaded
        problem file for this call.

        """
        logger.debug(f"execute {self.__class__.__name__} command '{command}'")
        handler = COMMANDS.get(command)
        if handler is None:
            raise InterfaceError(f"unknown command {command!r}; expected one of {sorted(COMMANDS)}")
        problem = arguments.pop("problem", None) or self._problem
        if problem is not None and not isinstance(problem, ProblemFile):
            problem = load_problem(problem)
        if problem is None and command != "selftest":
            raise InterfaceError(f"command {command!r} needs a problem; call executefile first")

        started = time.perf_counter()
        rows, outputs, verdict = handler(self, problem, **arguments)
        elapsed = time.perf_counter() - started
        inputs = {"command": command, "arguments": arguments, "config": asdict(self.config)}
        if problem is not None:
            inputs["problem"] = problem.to_dict()
        self._report = RunReport(
            command=command,
            inputs_digest=digest(inputs),
            outputs=outputs,
            rows=rows,
            wall_time=elapsed,
            version=__version__,
            seed=self.config.seed,
            verdict=verdict,
        )
        self._description = tuple(rows[0].keys()) if rows else ()
        self._iterator = iter(self._report.rows)
        return self._iterator

    @property
    @check_closed
    def description(self) -> Optional[ColumnNames]:
        """Column names of the current result set, None before any execute."""
        return self._description

    @property
    @check_closed
    def report(self) -> Optional[RunReport]:
        return self._report

    @property
    @check_closed
    def arraysize(self) -> int:
        return self._arraysize

    @arraysize.setter
    @check_closed
    def arraysize(self, value: int):
        if value > 0:
            self._arraysize = value
        else:
            raise InterfaceError(f"arraysize must be positive, got {value}")

    @check_closed
    def fetchone(self) -> Optional[ResultRow]:
        if self._iterator is None:
            raise InterfaceError("no command has been executed")
        try:
            return next(self._iterator)
        except StopIteration:
            return None

    @check_closed
    def fetchmany(self, size: Optional[int] = None) -> ResultSet:
        if self._iterator is None:
            raise InterfaceError("no command has been executed")
        result = []
        for _ in range(size or self.arraysize):
            row = self.fetchone()
            if row is None:
                break
            result.append(row)
        return result

    @check_closed
    def fetchall(self) -> ResultSet:
        if self._iterator is None:
            raise InterfaceError("no command has been executed")
        return list(self._iterator)

    @check_closed
    def close(self) -> None:
        logger.debug(f"close {self.__class__.__name__}")
        self._closed = True

    @property
    def closed(self) -> bool:
        return self._closed


def _point(value: Any, name: str) -> np.ndarray:
    if value is None:
        raise DataError(f"missing argument {name!r}")
    return Point(value)


def _grid(runner: Runner, problem: ProblemFile, ranges: Any, step: Optional[float]) -> Grid:
    config = runner.config
    if ranges is None:
        for entry in problem.expected.values():
            if entry.get("check") == "pareto" and "ranges" in entry["value"]:
                ranges = entry["value"]["ranges"]
                break
    if ranges is None:
        raise DataError("no grid ranges given and none recorded in the problem file")
    ranges = [ranges] * problem.dimension if np.ndim(ranges) == 1 else ranges
    return Grid(tuple(tuple(r) for r in ranges), step or config.grid_step, config.grid_cap)


def _schedule(runner: Runner, samples: Optional[int]) -> DLSchedule:
    config = runner.config
    return DLSchedule(samples=samples or 64, seed=config.seed, threads=config.threads)


def run_eval(runner: Runner, problem: ProblemFile, point=None, function=None) -> CommandResult:
    x = _point(point, "point")
    keys = [function] if function else list(problem.objectives)
    rows = [{"function": k, "x": x, "value": problem.function(k)(x)} for k in keys]
    return rows, {"values": {r["function"]: r["value"] for r in rows}}, POSITIVE


def run_subdiff(runner: Runner, problem: ProblemFile, point=None, function=None) -> CommandResult:
    x = _point(point, "point")
    if len(x) != 1:
        raise DataError("subdiff works on 1-D functions")
    report = subdiff_report(problem.function(function), float(x[0]))
    data = report.to_dict()
    rows = []
    for kind in ("frechet", "limiting", "singular", "clarke"):
        found = getattr(report, kind)
        rows.append({"kind": kind, "set": None if found is None else str(found), "value": data[kind]})
    return rows, data, POSITIVE


def run_dirlip(runner: Runner, problem: ProblemFile, point=None, function=None,
               direction=None, samples=None) -> CommandResult:
    x = _point(point, "point")
    f = problem.function(function)
    schedule = _schedule(runner, samples)
    if direction is not None:
        result = analyze_direction(f, x, direction, schedule)
        data = result.to_dict()
        rows = [
            {"level": j + 1, "t": t, "Q": q}
            for j, (t, q) in enumerate(zip(schedule.levels, result.quotients))
        ]
        return rows, data, POSITIVE if result.verdict == "DL" else NEGATIVE
    report = certify_dl(f, x, schedule)
    return report.table(), report.to_dict(), POSITIVE if report.is_dl else NEGATIVE


def run_pareto(runner: Runner, problem: ProblemFile, ranges=None, step=None,
               regularized=False) -> CommandResult:
    grid = _grid(runner, problem, ranges, step)
    target = problem.regularized() if regularized else problem.problem()
    result = pareto_bruteforce(target, grid, runner.config.threads)
    outputs: Dict[str, Any] = {"grid": grid.to_dict(), "count": len(result), "feasible": result.feasible}
    if len(result):
        lo, hi = result.hull()
        outputs["hull"] = [lo, hi]
    return result.rows(), outputs, POSITIVE if len(result) else NEGATIVE


def run_regularize(runner: Runner, problem: ProblemFile, center=None, lam=None, weights=None,
                   gamma=None, xbar=None, ranges=None, step=None) -> CommandResult:
    rp = problem.regularized(center, lam, weights)
    c = rp.center_point
    rows = [
        {"component": i, "psi": str(psi), "psi_at_center": psi(c), "f_at_center": f(c)}
        for i, (psi, f) in enumerate(zip(rp.psi, rp.F))
    ]
    outputs: Dict[str, Any] = {"center": c, "lam": rp.lam, "weights": rp.weights}
    verdict = POSITIVE
    if gamma is not None:
        scan = phi_gamma_scan(rp, xbar if xbar is not None else c, float(gamma),
                              _grid(runner, problem, ranges, step))
        outputs["scan"] = scan.to_dict()
        verdict = POSITIVE if scan.positive else NEGATIVE
    return rows, outputs, verdict


def run_certify(runner: Runner, problem: ProblemFile, point=None, center=None, lam=None,
                weights=None) -> CommandResult:
    config = runner.config
    rp = problem.regularized(center, lam, weights)
    options = CertificateOptions(config.tol, config.paper_literal, config.threads)
    certificate = certify_pareto(rp, _point(point, "point"), options)
    data = certificate.to_dict()
    row = {
        "point": data["point"],
        "verdict": certificate.verdict,
        "alpha": data["alpha"],
        "beta": data["beta"],
        "stationarity": certificate.stationarity,
        "alternate_residual": certificate.alternate_residual,
        "convention": certificate.convention,
    }
    return [row], data, POSITIVE if certificate.feasible else NEGATIVE


def run_penalty(runner: Runner, problem: ProblemFile, point=None, tau=None, function=None,
                radius=0.5, step=1e-4) -> CommandResult:
    if tau is None:
        raise DataError("missing argument 'tau'")
    report = exact_penalty_check(problem.function(function), problem.omega, _point(point, "point"),
                                 float(tau), float(radius), float(step))
    return [report.to_dict()], report.to_dict(), POSITIVE if report.passed else NEGATIVE


def run_solve(runner: Runner, problem: ProblemFile, x0=None, lam=None, weights=None,
              max_outer=None) -> CommandResult:
    config = runner.config
    block = problem.regularization
    if block is not None:
        lam = block.lam if lam is None else lam
        weights = block.weights if weights is None else weights
    if lam is None or weights is None:
        raise DataError("solve needs lam and weights (arguments or a regularization block)")
    overrides = {"max_outer": int(max_outer)} if max_outer else {}
    solver_config = SolverConfig(seed=config.seed, threads=config.threads, **overrides)
    trace = solve_ppa(problem.problem(), _point(x0, "x0"), float(lam), weights, solver_config)
    certified = trace.certificate is not None and trace.certificate.feasible
    return trace.rows(), trace.to_dict(), POSITIVE if certified else NEGATIVE


def run_selftest(runner: Runner, problem: Optional[ProblemFile], names=None) -> CommandResult:
    results = selftest(runner.config, names)
    rows = [r.to_dict() for r in results]
    failed = [f"{r.case}/{r.label}" for r in results if not r.passed]
    outputs = {"checks": len(results), "failed": failed}
    return rows, outputs, NEGATIVE if failed else POSITIVE


COMMANDS: Dict[str, Callable[..., CommandResult]] = {
    "eval": run_eval,
    "subdiff": run_subdiff,
    "dirlip": run_dirlip,
    "pareto": run_pareto,
    "regularize": run_regularize,
    "certify": run_certify,
    "penalty": run_penalty,
    "solve": run_solve,
    "selftest": run_selftest,
}
