"""Certification and solvers for theta-rho contractions of set-valued maps, plus Caputo inclusions."""

from .certify import (
    CertReport,
    ContractionSpec,
    PairEvidence,
    certify,
    nonlinear_ratio_limit,
    pair_check,
    remark_consequence_check,
    sample_domain,
    weak_theta_check,
)
from .fractional import GridFunction, caputo_deriv, gamma_fn, rl_integral, rl_integral_grid
from .functions import (
    BUILTIN_RHOS,
    BUILTIN_THETAS,
    RhoSpec,
    ThetaSpec,
    check_rho_axioms,
    rho_eval,
    theta_report,
)
from .inclusion import (
    condition_d_check,
    contraction_estimate,
    gamma1,
    gamma2,
    lambda_apply,
    solve_inclusion,
)
from .metric import (
    AbsoluteDifference,
    DomainError,
    FinitePoints,
    Interval,
    MaxOutsideMetric,
    MultiMap,
    PreconditionError,
    TableMetric,
    dist,
    dist_to_set,
    excess,
    hausdorff,
)
from .picard import SolverConfig, picard_cb, picard_compact, tail_bound_check, verify_sigma_decay
from .problem import FdeProblem, load_problem

__version__ = "0.1.0"
