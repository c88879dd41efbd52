"""Numerics for the first-order problem

    y'(t) - p(t) y(t) = sum_i f_i(t, y(t)),         t in [0, 1]
    lam y(0) = y(1) + sum_j Phi_j(tau_j, y(tau_j))

Green's kernel, the constants M and N, sampled checks of the growth
conditions (F1)-(F3), a shooting solver for all solutions in [0, C], and the
three-bucket localization of those solutions.
"""
__version__ = "0.1.0"

from .exprs import Expr, parse, evaluate
from .quadrature import integrate, cumulative, CumulativeCoefficient
from .green import GreensKernel, InadmissibleLambda, build_kernel, G, boundary_weight
from .problem import (
    BoundaryTerm, ProblemInstance, ThresholdSet, Settings, DerivedConstants,
    validate, derive_constants, load_instance, instance_from_dict,
)
from .hypotheses import HypothesisReport, check_hypotheses
from .curve import SolutionCurve, ode_residual, boundary_residual
from .operator import apply_K, picard
from .shooting import integrate_ivp, scan_residual, refine_root, solve_all
from .cone import theta, in_P_C, in_P_theta, concavity_check, classify, LocalizationReport

__all__ = [
    "Expr", "parse", "evaluate", "integrate", "cumulative", "CumulativeCoefficient",
    "GreensKernel", "InadmissibleLambda", "build_kernel", "G", "boundary_weight",
    "BoundaryTerm", "ProblemInstance", "ThresholdSet", "Settings", "DerivedConstants",
    "validate", "derive_constants", "load_instance", "instance_from_dict",
    "HypothesisReport", "check_hypotheses", "SolutionCurve", "ode_residual",
    "boundary_residual", "apply_K", "picard", "integrate_ivp", "scan_residual",
    "refine_root", "solve_all", "theta", "in_P_C", "in_P_theta", "concavity_check",
    "classify", "LocalizationReport",
]
