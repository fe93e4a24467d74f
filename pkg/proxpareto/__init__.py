"""
Regularized multiobjective optimization with directionally Lipschitzian
objectives.

The package evaluates piecewise-defined objectives, computes regular,
limiting, singular and Clarke subdifferentials, certifies directional
Lipschitz behaviour, enumerates Pareto lattices, checks multiplier
certificates for proximally regularized problems and runs a proximal
point solver.

"""
__version__ = "0.1.0"

from .certifier import (
    CertificateOptions,
    MultiplierCertificate,
    PenaltyReport,
    certify_front,
    certify_pareto,
    exact_penalty_check,
    lipschitz_at,
    penalty_tau_from_dl,
)
from .config import SessionConfig
from .contexts import ClosingContextMixin
from .dirlip import DLSchedule, DirLipReport, certify_dl, dl_calculus_check, quotient_limsup
from .exceptions import *
from .extensions import *
from .functions import (
    AffineInequality,
    Piece,
    PiecewiseFunction,
    VectorFunction,
    build_prox_objective,
    combine,
    evaluate,
    gradient,
    separable_parts,
)
from .problems import (
    ConstraintSet,
    Grid,
    MOProblem,
    RegularizedProblem,
    dist_subdiff,
    distance_and_projection,
    dominates,
    is_pareto_point,
    normal_cone,
    pareto_bruteforce,
    penalized_value,
    phi_gamma,
    phi_gamma_scan,
)
from .realsets import RealSet1D
from .reports import RunReport
from .runner import Runner
from .serialization import ProblemFile, load_problem, loads_problem
from .session import Session, connect
from .solver import SolverConfig, SolverTrace, proximal_step, scalarized_value, solve_ppa
from .subdifferentials import (
    clarke,
    clarke_dirderiv,
    frechet_subdiff,
    limiting_subdiff,
    numeric_frechet_probe,
    robustness_check,
    singular_subdiff,
    subdiff_report,
    sum_rule,
)
from .type_constructors import *
from .types_definitions import *

__all__ = [
    "Session",
    "SessionConfig",
    "Runner",
    "connect",
    "ClosingContextMixin",
    "SessionErrorsMixin",
    "IterableRunnerMixin",
    "RealSet1D",
    "AffineInequality",
    "Piece",
    "PiecewiseFunction",
    "VectorFunction",
    "evaluate",
    "combine",
    "build_prox_objective",
    "separable_parts",
    "gradient",
    "frechet_subdiff",
    "limiting_subdiff",
    "singular_subdiff",
    "clarke",
    "clarke_dirderiv",
    "subdiff_report",
    "sum_rule",
    "robustness_check",
    "numeric_frechet_probe",
    "DLSchedule",
    "DirLipReport",
    "quotient_limsup",
    "certify_dl",
    "dl_calculus_check",
    "ConstraintSet",
    "Grid",
    "MOProblem",
    "RegularizedProblem",
    "distance_and_projection",
    "normal_cone",
    "dist_subdiff",
    "dominates",
    "pareto_bruteforce",
    "is_pareto_point",
    "phi_gamma",
    "phi_gamma_scan",
    "penalized_value",
    "CertificateOptions",
    "MultiplierCertificate",
    "PenaltyReport",
    "lipschitz_at",
    "certify_front",
    "certify_pareto",
    "exact_penalty_check",
    "penalty_tau_from_dl",
    "SolverConfig",
    "SolverTrace",
    "scalarized_value",
    "proximal_step",
    "solve_ppa",
    "ProblemFile",
    "load_problem",
    "loads_problem",
    "RunReport",
    "Error",
    "InterfaceError",
    "AnalysisError",
    "DataError",
    "DomainError",
    "SchemaError",
    "CapacityError",
    "PreconditionError",
    "NotLipschitzError",
    "NotDirectionallyLipschitzError",
    "BlowUpError",
    "UnsupportedAtomError",
    "NotSupportedError",
    "ConcreteErrorMixin",
    "Point",
    "Var",
    "Const",
    "Root",
    "Dist2",
    "Interval",
    "Ray",
    "Vector",
    "VectorLike",
    "Matrix",
    "ResultRow",
    "ResultSet",
    "ColumnNames",
]
