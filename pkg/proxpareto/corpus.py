"""
Bundled regression problems and the self-test that replays their
expected results.

Every problem file in `corpus/` carries an `expected` block whose entries
name a check, the values to compare against and where those values come
from.

"""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from .certifier import CertificateOptions, certify_front, certify_pareto, exact_penalty_check
from .config import SessionConfig
from .dirlip import DLSchedule, certify_dl
from .exceptions import Error
from .functions import combine
from .logging_utils import logger
from .parallel import ordered_map
from .problems import Grid, pareto_bruteforce, phi_gamma_scan
from .realsets import RealSet1D
from .serialization import ProblemFile, load_problem
from .solver import SolverConfig, solve_ppa
from .subdifferentials import subdiff_report, sum_rule
from .types_definitions import JSONDict

__all__ = ["CORPUS_DIR", "CheckResult", "corpus_names", "load_case", "run_case", "selftest"]

CORPUS_DIR = Path(__file__).parent / "corpus"


def corpus_names() -> List[str]:
    return sorted(p.stem for p in CORPUS_DIR.glob("*.json"))


def load_case(name: str) -> ProblemFile:
    return load_problem(CORPUS_DIR / f"{name}.json")


@dataclass(frozen=True)
class CheckResult:
    case: str
    label: str
    check: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> JSONDict:
        return {
            "case": self.case,
            "label": self.label,
            "check": self.check,
            "passed": self.passed,
            "detail": self.detail,
        }


def _grid(spec: Mapping[str, Any], config: SessionConfig) -> Grid:
    ranges = tuple(tuple(r) for r in spec["ranges"])
    return Grid(ranges, spec.get("step", config.grid_step), config.grid_cap)


def _check_eval(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    value = pf.function(v.get("function"))(v["point"])
    return math.isclose(value, v["result"], abs_tol=v.get("tol", 1e-12)), f"value {value}"


def _check_subdiff(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    report = subdiff_report(pf.function(v.get("function")), float(v["point"]))
    got = getattr(report, v["kind"])
    if got is None:
        return v["set"] is None, f"{v['kind']} undefined"
    want = RealSet1D.from_dict(v["set"])
    return got.isclose(want, tol=v.get("tol", 1e-9)), f"{v['kind']} {got}"


def _check_lipschitz(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    report = subdiff_report(pf.function(v.get("function")), float(v["point"]))
    return report.lipschitz == v["result"], f"singular {report.singular}"


def _check_combine(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    combined = combine(v["kind"], [pf.function(k) for k in v["functions"]])
    value = combined(v["point"])
    return math.isclose(value, v["result"], abs_tol=v.get("tol", 1e-12)), f"value {value}"


def _check_sum_rule(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    result = sum_rule([pf.function(k) for k in v["functions"]], float(v["point"]))
    ok = result.qualified == v["qualified"]
    if ok and "limiting" in v:
        ok = result.limiting.isclose(RealSet1D.from_dict(v["limiting"]))
    return ok, f"qualified={result.qualified} limiting={result.limiting}"


def _check_dirlip(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    schedule = DLSchedule(seed=config.seed, threads=config.threads)
    report = certify_dl(pf.function(v.get("function")), v["point"], schedule)
    ok = report.verdict == v["verdict"]
    if ok and "witness" in v:
        target = np.asarray(v["witness"], dtype=float)
        target /= np.linalg.norm(target)
        cosine = -1.0 if report.direction is None else float(np.dot(report.direction, target))
        ok = cosine >= v.get("cosine", 0.9)
    if ok and "max_constant" in v:
        ok = report.constant is not None and report.constant <= v["max_constant"]
    if ok and "slope_range" in v:
        lo, hi = v["slope_range"]
        ok = lo <= report.slope <= hi
    detail = f"verdict {report.verdict} direction {report.direction} L={report.constant} slope={report.slope:.3g}"
    return ok, detail


def _check_pareto(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    grid = _grid(v, config)
    problem = pf.regularized() if v.get("regularized") else pf.problem()
    result = pareto_bruteforce(problem, grid, config.threads)
    if len(result) == 0:
        return False, "empty Pareto lattice"
    lo, hi = result.hull()
    want_lo, want_hi = (np.asarray(b, dtype=float) for b in v["hull"])
    slack = grid.step + 1e-9
    ok = bool(np.all(np.abs(lo - want_lo) <= slack) and np.all(np.abs(hi - want_hi) <= slack))
    return ok, f"hull {lo.tolist()} .. {hi.tolist()} from {len(result)} points"


def _check_scan(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    rp = pf.regularized()
    scan = phi_gamma_scan(rp, v["xbar"], v["gamma"], _grid(v, config))
    return scan.positive == v["positive"], f"minimum {scan.minimum:.3g} at {list(scan.argmin)}"


def _check_certify(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    rp = pf.regularized()
    options = CertificateOptions(
        tol=v.get("tol", config.tol),
        paper_literal=v.get("paper_literal", False),
        threads=config.threads,
    )
    certificate = certify_pareto(rp, v["point"], options)
    ok = certificate.verdict == v["verdict"]
    if ok and "residual" in v:
        ok = math.isclose(certificate.stationarity, v["residual"], abs_tol=v.get("residual_tol", 1e-6))
    return ok, f"{certificate.verdict} residual {certificate.stationarity:.3g}"


def _check_certify_front(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    grid = _grid(v, config)
    options = CertificateOptions(tol=v.get("tol", config.tol), threads=config.threads)
    certificates = certify_front(pf.regularized(), grid, options)
    if not certificates:
        return False, "no Lipschitz point on the Pareto lattice"
    worst = max(c.stationarity for c in certificates)
    bound = v.get("floor", 1e-4) + v["residual_slope"] * grid.step
    return worst <= bound, f"worst residual {worst:.3g} over {len(certificates)} points, bound {bound:.3g}"


def _check_penalty(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    report = exact_penalty_check(
        pf.function(v.get("function")), pf.omega, v["point"], v["tau"],
        v.get("radius", 0.5), v.get("step", 1e-4),
    )
    return report.passed == v["passed"], f"{report.verdict} at {report.violating_point}"


def _check_solve(pf: ProblemFile, v: Mapping[str, Any], config: SessionConfig):
    solver_config = SolverConfig(
        max_outer=v.get("max_outer", 50), seed=config.seed, threads=config.threads
    )
    trace = solve_ppa(pf.problem(), v["x0"], v["lam"], v["weights"], solver_config)
    final = trace.final
    lo, hi = v["interval"]
    tol = v.get("tol", 1e-3)
    ok = bool(np.all(final >= lo - tol) and np.all(final <= hi + tol)) and trace.is_monotone()
    if ok and "reach_steps" in v:
        early = trace.iterates[: v["reach_steps"] + 1]
        ok = any(np.all(x >= lo - tol) and np.all(x <= hi + tol) for x in early)
    if ok and "certificate" in v:
        ok = trace.certificate is not None and trace.certificate.verdict == v["certificate"]
    return ok, f"final {final.tolist()} after {len(trace.steps) - 1} steps ({trace.termination})"


CHECKS: Dict[str, Callable] = {
    "eval": _check_eval,
    "subdiff": _check_subdiff,
    "lipschitz": _check_lipschitz,
    "combine": _check_combine,
    "sum_rule": _check_sum_rule,
    "dirlip": _check_dirlip,
    "pareto": _check_pareto,
    "scan": _check_scan,
    "certify": _check_certify,
    "certify_front": _check_certify_front,
    "penalty": _check_penalty,
    "solve": _check_solve,
}


def run_case(
    name: str, config: Optional[SessionConfig] = None, problem: Optional[ProblemFile] = None
) -> List[CheckResult]:
    config = config or SessionConfig()
    pf = problem or load_case(name)
    logger.debug(f"corpus case {name}: {len(pf.expected)} checks")
    results = []
    for label, entry in sorted(pf.expected.items()):
        check = entry.get("check", label)
        runner = CHECKS.get(check)
        if runner is None:
            results.append(CheckResult(name, label, check, False, f"unknown check {check!r}"))
            continue
        value = entry["value"]
        raises = value.get("raises")
        try:
            passed, detail = runner(pf, value, config)
            if raises:
                passed, detail = False, f"expected {raises}, got {detail}"
        except Error as exc:
            passed, detail = type(exc).__name__ == raises, f"{type(exc).__name__}: {exc}"
        if not passed:
            logger.warning(f"corpus regression {name}/{label}: {detail}")
        results.append(CheckResult(name, label, check, bool(passed), detail))
    return results


def selftest(config: Optional[SessionConfig] = None, names: Optional[Sequence[str]] = None) -> List[CheckResult]:
    """Replay every bundled case; results are ordered by case and label."""
    config = config or SessionConfig()
    names = list(names) if names else corpus_names()
    per_case = ordered_map(lambda n: run_case(n, config), names, config.threads)
    return [r for results in per_case for r in results]
