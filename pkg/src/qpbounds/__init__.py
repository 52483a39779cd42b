"""SDP-based upper and lower bounds for quadratic optimization over norm balls."""

from .conic import (
    Cone,
    ConeBlock,
    ConeProgram,
    ConeSolution,
    ConicSolverError,
    SolverSettings,
    SolverStatus,
    cone_membership_violation,
    residuals,
    solve,
)
from .linalg import EigDecomp, eig_sym, lambda_max, project_psd, smat, svec
from .oracle import OracleResult, qpl1_exact_small, qpl2l1_heuristic, qplp_lower_bound
from .relax import (
    BoundCertificate,
    BuiltRelaxation,
    Relaxation,
    RelaxationResult,
    bound_b1,
    bound_b2,
    build,
    eq_bound_certificate,
    extract_x,
    lift_qtilde,
    lp_factor,
    repair_complementarity,
    solve_relaxation,
    splitting_matrix,
)
from .rng import SplitMix64, random_psd, random_symmetric, random_unit_vector

__version__ = "0.1.0"

__all__ = [
    "Cone",
    "ConeBlock",
    "ConeProgram",
    "ConeSolution",
    "ConicSolverError",
    "SolverSettings",
    "SolverStatus",
    "cone_membership_violation",
    "residuals",
    "solve",
    "EigDecomp",
    "eig_sym",
    "lambda_max",
    "project_psd",
    "smat",
    "svec",
    "OracleResult",
    "qpl1_exact_small",
    "qpl2l1_heuristic",
    "qplp_lower_bound",
    "BoundCertificate",
    "BuiltRelaxation",
    "Relaxation",
    "RelaxationResult",
    "bound_b1",
    "bound_b2",
    "build",
    "eq_bound_certificate",
    "extract_x",
    "lift_qtilde",
    "lp_factor",
    "repair_complementarity",
    "solve_relaxation",
    "splitting_matrix",
    "SplitMix64",
    "random_psd",
    "random_symmetric",
    "random_unit_vector",
    "__version__",
]
