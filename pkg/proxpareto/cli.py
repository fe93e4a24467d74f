"""
Command-line entry point.

    proxpareto pareto kinked-pair --range=-3:2 --grid-step 1e-3
    proxpareto subdiff oscillating-pair --function f1 --point 0
    proxpareto selftest

Problems are given as a path to a problem file or the name of a bundled
corpus case. Exit status: 0 success, 1 invalid input, 2 negative verdict
(no certificate, not-DL, failed penalty check, failed self-test),
3 violated precondition.

"""
import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .config import SessionConfig
from .corpus import CORPUS_DIR
from .exceptions import AnalysisError, DataError, Error, InterfaceError, PreconditionError
from .logging_utils import LEVELS, logger, set_level
from .reports import RunReport
from .runner import NEGATIVE
from .session import connect

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_INVALID", "EXIT_NEGATIVE", "EXIT_PRECONDITION"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NEGATIVE = 2
EXIT_PRECONDITION = 3


def _vector(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _range(text: str) -> List[float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=None, help="certificate tolerance (default 1e-6)")
    parser.add_argument("--seed", type=int, default=None, help="seed of every randomized procedure")
    parser.add_argument("--grid-step", type=float, default=None, help="lattice step (default 1e-3)")
    parser.add_argument("--paper-literal", action="store_true", default=None,
                        help="take the prox gradient as lam*(x - center)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads")
    parser.add_argument("--out", type=Path, default=None, help="write the run report to this path")
    parser.add_argument("--json", action="store_true", help="print the run report instead of a table")


def _with_problem(sub, name: str, help_text: str) -> argparse.ArgumentParser:
    parser = sub.add_parser(name, help=help_text)
    parser.add_argument("problem", help="problem file or bundled case name")
    _common(parser)
    return parser


class ArgumentParser(argparse.ArgumentParser):
    """Reports malformed command lines as `DataError` instead of exiting."""

    def error(self, message: str):
        raise DataError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="proxpareto", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", type=str.upper, choices=LEVELS, default=None,
                        help="override PROXPARETO_LOGLEVEL for this run")
    sub = parser.add_subparsers(dest="command", required=True)

    p = _with_problem(sub, "eval", "evaluate objectives at a point")
    p.add_argument("--point", type=_vector, required=True)
    p.add_argument("--function", default=None)

    p = _with_problem(sub, "subdiff", "regular, limiting, singular and Clarke sets of a 1-D function")
    p.add_argument("--point", type=_vector, required=True)
    p.add_argument("--function", default=None)

    p = _with_problem(sub, "dirlip", "directional Lipschitz certification")
    p.add_argument("--point", type=_vector, required=True)
    p.add_argument("--function", default=None)
    p.add_argument("--direction", type=_vector, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = _with_problem(sub, "pareto", "brute-force Pareto lattice")
    p.add_argument("--range", dest="ranges", type=_range, action="append", default=None,
                   help="LO:HI per coordinate; repeat for each dimension")
    p.add_argument("--regularized", action="store_true")

    p = _with_problem(sub, "regularize", "build the proximal regularization and scan phi_gamma")
    p.add_argument("--center", type=_vector, default=None)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--weights", type=_vector, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--xbar", type=_vector, default=None)
    p.add_argument("--range", dest="ranges", type=_range, action="append", default=None)

    p = _with_problem(sub, "certify", "multiplier certificate at a point")
    p.add_argument("--point", type=_vector, required=True)
    p.add_argument("--center", type=_vector, default=None)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--weights", type=_vector, default=None)

    p = _with_problem(sub, "penalty", "exact penalty check")
    p.add_argument("--point", type=_vector, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--function", default=None)
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--step", type=float, default=1e-4)

    p = _with_problem(sub, "solve", "proximal point iterations")
    p.add_argument("--x0", type=_vector, required=True)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--weights", type=_vector, default=None)
    p.add_argument("--max-outer", type=int, default=None)

    p = sub.add_parser("selftest", help="replay the bundled corpus")
    p.add_argument("--case", dest="names", action="append", default=None)
    _common(p)
    return parser


def _resolve_problem(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = CORPUS_DIR / f"{name}.json"
    if bundled.exists():
        return bundled
    raise DataError(f"no problem file {name!r} and no bundled case of that name")


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        return "[" + ", ".join(_cell(v) for v in value) + "]"
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return str(value)


def format_table(columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
    cells = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[k]) for r in cells]) for k, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)


def _arguments(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {
        "command", "problem", "tol", "seed", "grid_step", "paper_literal", "threads", "out", "json", "log_level",
    }
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None and v is not False}


def run(args: argparse.Namespace) -> RunReport:
    config = SessionConfig().updated(
        tol=args.tol, seed=args.seed, grid_step=args.grid_step,
        paper_literal=args.paper_literal, threads=args.threads,
    )
    with connect(config) as session, session.runner() as runner:
        if args.command != "selftest":
            runner.executefile(_resolve_problem(args.problem))
        runner.execute(args.command, **_arguments(args))
        columns, rows = runner.description, runner.fetchall()
        report = runner.report
    if args.out is not None:
        report.write(args.out)
    if args.json:
        print(report.to_json())
    else:
        print(format_table(columns, rows) if columns else "(no rows)")
        print(f"verdict: {report.verdict}")
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            set_level(args.log_level)
        report = run(args)
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (AnalysisError, InterfaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Error as exc:
        logger.error(f"unexpected toolkit error: {exc}")
        return EXIT_INVALID
    return EXIT_NEGATIVE if report.verdict == NEGATIVE else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
