"""Sparse monotone additive regression with I-spline bases.

Each covariate is expanded in a monotone spline basis and whole
coefficient blocks are selected by a sign-coherent group penalty, so a
selected component is a monotone curve.  Adaptive second stages shrink
the false-positive rate; linear-lasso and B-spline baselines, K-fold
cross-validation tuning, and a simulation benchmark harness round out
the toolkit.  See the command line entry point ``monospline`` for file
based workflows.
"""

from .design import DesignMatrix, build_design, center_response, expand_new
from .estimators import (
    FitResult,
    component_curve,
    component_values,
    fit_adaptive_lasso,
    fit_adaptive_ms_lasso,
    fit_bs_lasso,
    fit_lasso,
    fit_ms_lasso,
    predict,
)
from .model_selection import CVResult, cv_curve, kfold_split, select_lambda
from .simulation import SimConfig, SimReport, format_table, run_experiment
from .solver import (
    PenaltySpec,
    SolverConfig,
    SolverResult,
    kkt_residual,
    lambda_max,
    lambda_path,
    prox_coop,
    sign_coherence_check,
    solve,
)
from .splines import BasisSpec, KnotVector, bspline_eval, ispline_eval, make_knots, mspline_eval

__version__ = "0.1.0"

__all__ = [
    "BasisSpec",
    "CVResult",
    "DesignMatrix",
    "FitResult",
    "KnotVector",
    "PenaltySpec",
    "SimConfig",
    "SimReport",
    "SolverConfig",
    "SolverResult",
    "bspline_eval",
    "build_design",
    "center_response",
    "component_curve",
    "component_values",
    "cv_curve",
    "expand_new",
    "fit_adaptive_lasso",
    "fit_adaptive_ms_lasso",
    "fit_bs_lasso",
    "fit_lasso",
    "fit_ms_lasso",
    "format_table",
    "ispline_eval",
    "kfold_split",
    "kkt_residual",
    "lambda_max",
    "lambda_path",
    "make_knots",
    "mspline_eval",
    "predict",
    "prox_coop",
    "run_experiment",
    "select_lambda",
    "sign_coherence_check",
    "solve",
    "__version__",
]
