"""High-level fits: sparse monotone additive regression and baselines.

Five methods share one pipeline (expand -> center -> penalized solve):

* ``ms``     : I-spline basis, sign-coherent group penalty.  Selected
               components are monotone whenever their block is sign-coherent.
* ``ams``    : adaptive second stage of ``ms`` with weights 1/||b_j|| and
               infinite weight (exclusion) for unselected groups.
* ``lasso``  : identity basis, l1 penalty (plain linear lasso).
* ``alasso`` : adaptive lasso, weights 1/|b_k|.
* ``bs``     : quadratic B-spline basis with a group penalty and the same
               adaptive second stage (no monotonicity guarantee; serves as
               the unconstrained smooth baseline).

The penalty strength is chosen by K-fold cross-validation when not given.
Adaptive stages tune their own strength by CV with the stage-one weights
held fixed, and excluded covariates are dropped from the problem before
solving, which makes the second stage cheap even at large P.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .design import DesignMatrix, build_design, center_response, expand_new
from .model_selection import CVResult, cv_curve
from .solver import (
    PenaltySpec,
    SolverConfig,
    kkt_residual,
    lambda_max,
    lambda_path,
    sign_coherence_check,
    solve,
)
from .splines import BasisSpec, apply_rescale, make_knots

__all__ = [
    "FitResult",
    "fit_ms_lasso",
    "fit_adaptive_ms_lasso",
    "fit_lasso",
    "fit_adaptive_lasso",
    "fit_bs_lasso",
    "predict",
    "component_curve",
    "component_values",
]

SUPPORT_TOL = 1e-10


@dataclass
class FitResult:
    """One fitted model with its transforms and diagnostics.

    ``beta`` is the full-length grouped coefficient vector (zeros for
    groups the penalty excluded).  ``lam_initial``, ``weights`` and
    ``cv_initial`` are populated by the adaptive methods and record the
    first stage; ``note`` carries degenerate-case diagnostics such as an
    empty initial support.
    """

    method: str
    beta: np.ndarray
    intercept: float
    lam: float | None
    design: DesignMatrix
    weights: np.ndarray | None = None
    lam_initial: float | None = None
    kkt: float = 0.0
    sign_coherent: np.ndarray | None = None
    converged: bool = True
    cv: CVResult | None = None
    cv_initial: CVResult | None = None
    note: str = ""

    @property
    def support(self) -> np.ndarray:
        """Covariate indices whose block holds a coefficient > 1e-10."""
        idx = [
            j
            for j, g in enumerate(self.design.groups)
            if np.any(np.abs(self.beta[g]) > SUPPORT_TOL)
        ]
        return np.array(idx, dtype=int)

    def to_dict(self) -> dict:
        """JSON-serializable summary, sufficient to predict on new data."""
        d = self.design
        kv = d.basis.knot_vector
        return {
            "method": self.method,
            "lam": self.lam,
            "lam_initial": self.lam_initial,
            "intercept": self.intercept,
            "basis": {
                "kind": d.basis.kind,
                "interior_knots": None if kv is None else kv.interior_count,
                "order": None if kv is None else kv.order,
            },
            "beta": [self.beta[g].tolist() for g in d.groups],
            "weights": None
            if self.weights is None
            else [w if np.isfinite(w) else None for w in self.weights],
            "rescale": [list(r) for r in d.rescale],
            "column_means": d.column_means.tolist(),
            "y_mean": self.intercept,
            "diagnostics": {
                "kkt": self.kkt,
                "converged": self.converged,
                "support": self.support.tolist(),
                "sign_coherent": None
                if self.sign_coherent is None
                else [bool(f) for f in self.sign_coherent],
                "note": self.note,
            },
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FitResult":
        b = payload["basis"]
        if b["kind"] == "identity":
            basis = BasisSpec(kind="identity")
        else:
            basis = BasisSpec(kind=b["kind"],
                              knot_vector=make_knots(b["interior_knots"], b["order"]))
        beta_groups = [np.asarray(bj, dtype=float) for bj in payload["beta"]]
        m = basis.m
        P = len(beta_groups)
        design = DesignMatrix(
            Z=np.zeros((0, P * m)),
            groups=tuple(slice(j * m, (j + 1) * m) for j in range(P)),
            column_means=np.asarray(payload["column_means"], dtype=float),
            basis=basis,
            rescale=tuple(tuple(r) for r in payload["rescale"]),
            y_mean=payload["y_mean"],
        )
        weights = payload.get("weights")
        if weights is not None:
            weights = np.array(
                [np.inf if w is None else float(w) for w in weights]
            )
        diag = payload.get("diagnostics", {})
        coher = diag.get("sign_coherent")
        return cls(
            method=payload["method"],
            beta=np.concatenate(beta_groups),
            intercept=float(payload["intercept"]),
            lam=payload["lam"],
            design=design,
            weights=weights,
            lam_initial=payload.get("lam_initial"),
            kkt=float(diag.get("kkt", 0.0)),
            sign_coherent=None if coher is None else np.asarray(coher, dtype=bool),
            converged=bool(diag.get("converged", True)),
            note=diag.get("note", ""),
        )


def _log_grid(lmax: float, grid_size: int, ratio: float) -> np.ndarray:
    if lmax <= 0.0:
        return np.zeros(1)
    if grid_size == 1:
        return np.array([lmax])
    return lmax * np.power(ratio, np.linspace(0.0, 1.0, grid_size))


def _fit_single_stage(
    X,
    y,
    basis: BasisSpec,
    kind: str,
    weights: np.ndarray,
    method: str,
    lam: float | None,
    folds: int,
    seed: int,
    grid_size: int,
    grid_ratio: float,
    cfg: SolverConfig | None,
    design: DesignMatrix | None = None,
    fold_assignment=None,
):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if design is None:
        design = build_design(X, basis)
    y_c, y_mean = center_response(y)
    design = replace(design, y_mean=y_mean)
    pen0 = PenaltySpec(kind, design.groups, weights)
    base_cfg = cfg if cfg is not None else SolverConfig()
    # the reported fit carries an optimality certificate; intermediate
    # path/CV solves stay on the cheaper stagnation rule
    final_cfg = (
        base_cfg if base_cfg.kkt_tol is not None
        else replace(base_cfg, kkt_tol=1e-4)
    )

    cvr = None
    if lam is None:
        lmax = lambda_max(design.Z, y_c, pen0)
        grid = _log_grid(lmax, grid_size, grid_ratio)
        cvr = cv_curve(X, y, basis, kind, weights, grid, K=folds, seed=seed,
                       folds=fold_assignment, cfg=cfg)
        lam = cvr.lam
        # warm-started descent down the grid to the chosen strength
        upto = int(np.flatnonzero(grid == lam)[0]) + 1
        warm = None
        if upto > 1:
            path = lambda_path(design.Z, y_c, pen0, cfg=cfg,
                               lambdas=grid[: upto - 1])
            warm = path[-1].beta
        res = solve(
            design.Z, y_c,
            PenaltySpec(kind, design.groups, weights, float(lam)),
            cfg=final_cfg, warm_start=warm,
        )
    else:
        res = solve(
            design.Z, y_c,
            PenaltySpec(kind, design.groups, weights, float(lam)),
            cfg=final_cfg,
        )

    return FitResult(
        method=method,
        beta=res.beta,
        intercept=y_mean,
        lam=float(lam),
        design=design,
        weights=weights,
        kkt=res.kkt,
        sign_coherent=res.sign_coherent,
        converged=res.converged,
        cv=cvr,
    )


def _adaptive_weights(initial: FitResult) -> np.ndarray:
    """Per-group weights 1/||b_j||, infinite where the group was empty."""
    w = np.empty(len(initial.design.groups))
    for j, g in enumerate(initial.design.groups):
        norm = np.linalg.norm(initial.beta[g])
        w[j] = 1.0 / norm if norm > SUPPORT_TOL else np.inf
    return w


def _fit_adaptive_stage(
    X,
    y,
    initial: FitResult,
    kind: str,
    method: str,
    lam: float | None,
    folds: int,
    seed: int,
    grid_size: int,
    grid_ratio: float,
    cfg: SolverConfig | None,
    fold_assignment=None,
):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    design = initial.design
    basis = design.basis
    weights = _adaptive_weights(initial)
    y_c, y_mean = center_response(y)
    P = len(design.groups)

    sel = np.flatnonzero(np.isfinite(weights))
    if sel.size == 0:
        return FitResult(
            method=method,
            beta=np.zeros(design.Z.shape[1]),
            intercept=y_mean,
            lam=None,
            design=design,
            weights=weights,
            lam_initial=initial.lam,
            sign_coherent=np.ones(P, dtype=bool),
            converged=True,
            cv_initial=initial.cv,
            note="initial support empty; returning the null model",
        )

    # the excluded covariates are pinned to zero, so the second stage is
    # solved on the selected columns only and scattered back afterwards
    X_sub = X[:, sel]
    w_sub = weights[sel]
    sub = _fit_single_stage(
        X_sub, y, basis, kind, w_sub, method, lam, folds, seed,
        grid_size, grid_ratio, cfg, fold_assignment=fold_assignment,
    )

    m = basis.m
    beta = np.zeros(P * m)
    for i, j in enumerate(sel):
        beta[design.groups[j]] = sub.beta[sub.design.groups[i]]

    pen_full = PenaltySpec(kind, design.groups, weights, sub.lam)
    return FitResult(
        method=method,
        beta=beta,
        intercept=y_mean,
        lam=sub.lam,
        design=replace(design, y_mean=y_mean),
        weights=weights,
        lam_initial=initial.lam,
        kkt=kkt_residual(design.Z, y_c, beta, pen_full),
        sign_coherent=sign_coherence_check(beta, design.groups),
        converged=sub.converged,
        cv=sub.cv,
        cv_initial=initial.cv,
    )


def fit_ms_lasso(
    X,
    y,
    lam: float | None = None,
    knots: int = 6,
    order: int = 2,
    folds: int = 10,
    seed: int = 0,
    grid_size: int = 100,
    grid_ratio: float = 1e-3,
    cfg: SolverConfig | None = None,
    fold_assignment=None,
) -> FitResult:
    """Monotone-spline lasso: I-spline basis + sign-coherent group penalty.

    ``lam=None`` selects the strength by ``folds``-fold cross-validation
    over a log grid of ``grid_size`` points spanning
    [grid_ratio * lambda_max, lambda_max].
    """
    X = np.asarray(X, dtype=float)
    basis = BasisSpec(kind="ispline", knot_vector=make_knots(knots, order))
    return _fit_single_stage(
        X, y, basis, "coop", np.ones(X.shape[1]), "ms", lam,
        folds, seed, grid_size, grid_ratio, cfg, fold_assignment=fold_assignment,
    )


def fit_adaptive_ms_lasso(
    X,
    y,
    lam: float | None = None,
    lam_initial: float | None = None,
    initial_fit: FitResult | None = None,
    knots: int = 6,
    order: int = 2,
    folds: int = 10,
    seed: int = 0,
    grid_size: int = 100,
    grid_ratio: float = 1e-3,
    cfg: SolverConfig | None = None,
    fold_assignment=None,
) -> FitResult:
    """Two-stage monotone-spline lasso with data-driven group weights.

    Stage one is :func:`fit_ms_lasso` (reused when ``initial_fit`` is
    given); stage two reweights each group by the inverse of its stage-one
    norm, drops empty groups entirely, and re-tunes the strength.  The
    returned support is therefore always nested in the stage-one support.
    """
    if initial_fit is None:
        initial_fit = fit_ms_lasso(
            X, y, lam_initial, knots, order, folds, seed,
            grid_size, grid_ratio, cfg, fold_assignment=fold_assignment,
        )
    return _fit_adaptive_stage(
        X, y, initial_fit, "coop", "ams", lam, folds, seed,
        grid_size, grid_ratio, cfg, fold_assignment=fold_assignment,
    )


def fit_lasso(
    X,
    y,
    lam: float | None = None,
    folds: int = 10,
    seed: int = 0,
    grid_size: int = 100,
    grid_ratio: float = 1e-3,
    cfg: SolverConfig | None = None,
    fold_assignment=None,
) -> FitResult:
    """Plain lasso on the raw covariates (identity basis, l1 penalty)."""
    X = np.asarray(X, dtype=float)
    return _fit_single_stage(
        X, y, BasisSpec(kind="identity"), "l1", np.ones(X.shape[1]), "lasso",
        lam, folds, seed, grid_size, grid_ratio, cfg,
        fold_assignment=fold_assignment,
    )


def fit_adaptive_lasso(
    X,
    y,
    lam: float | None = None,
    lam_initial: float | None = None,
    initial_fit: FitResult | None = None,
    folds: int = 10,
    seed: int = 0,
    grid_size: int = 100,
    grid_ratio: float = 1e-3,
    cfg: SolverConfig | None = None,
    fold_assignment=None,
) -> FitResult:
    """Adaptive lasso: weights 1/|b_k| from a first-stage lasso."""
    if initial_fit is None:
        initial_fit = fit_lasso(
            X, y, lam_initial, folds, seed, grid_size, grid_ratio, cfg,
            fold_assignment=fold_assignment,
        )
    return _fit_adaptive_stage(
        X, y, initial_fit, "l1", "alasso", lam, folds, seed,
        grid_size, grid_ratio, cfg, fold_assignment=fold_assignment,
    )


def fit_bs_lasso(
    X,
    y,
    lam: float | None = None,
    lam_initial: float | None = None,
    knots: int = 6,
    degree: int = 2,
    folds: int = 10,
    seed: int = 0,
    grid_size: int = 100,
    grid_ratio: float = 1e-3,
    cfg: SolverConfig | None = None,
    fold_assignment=None,
) -> FitResult:
    """Adaptive group lasso on a quadratic B-spline expansion.

    Both stages use the plain group norm, so fitted components are smooth
    but not constrained to be monotone.  ``degree`` is the polynomial
    degree of the B-splines (default 2, i.e. order 3).
    """
    X = np.asarray(X, dtype=float)
    basis = BasisSpec(kind="bspline", knot_vector=make_knots(knots, degree + 1))
    initial = _fit_single_stage(
        X, y, basis, "group", np.ones(X.shape[1]), "bs", lam_initial,
        folds, seed, grid_size, grid_ratio, cfg, fold_assignment=fold_assignment,
    )
    return _fit_adaptive_stage(
        X, y, initial, "group", "bs", lam, folds, seed,
        grid_size, grid_ratio, cfg, fold_assignment=fold_assignment,
    )


def predict(fit: FitResult, X_new) -> np.ndarray:
    """Fitted values ``intercept + Z_new @ beta`` on new covariate rows."""
    Z_new = expand_new(X_new, fit.design)
    return fit.intercept + Z_new @ fit.beta


def component_curve(fit: FitResult, j: int, grid) -> np.ndarray:
    """Fitted component j over a grid of unit-interval positions.

    The grid parametrizes the observed covariate range: position u maps
    to the rescaled basis argument for spline fits and to
    ``lo + u * (hi - lo)`` on the raw scale for the identity basis.  The
    curve is the centered-basis combination, so it averages roughly zero
    over the training points.
    """
    groups = fit.design.groups
    if not 0 <= j < len(groups):
        raise IndexError(f"covariate index {j} out of range for P={len(groups)}")
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.min() < 0.0 or grid.max() > 1.0):
        raise ValueError("grid positions must lie in [0, 1]")
    basis = fit.design.basis
    if basis.kind == "identity":
        lo, hi = fit.design.rescale[j]
        B = basis.evaluate(lo + grid * (hi - lo))
    else:
        B = basis.evaluate(grid)
    g = groups[j]
    return (B - fit.design.column_means[g]) @ fit.beta[g]


def component_values(fit: FitResult, j: int, x) -> np.ndarray:
    """Fitted component j at raw covariate values.

    Same centered-basis combination as :func:`component_curve` but taking
    raw inputs on the original scale of covariate j.  Spline bases clamp
    to the training range; the identity basis extrapolates.
    """
    groups = fit.design.groups
    if not 0 <= j < len(groups):
        raise IndexError(f"covariate index {j} out of range for P={len(groups)}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    basis = fit.design.basis
    if basis.kind == "identity":
        B = basis.evaluate(x)
    else:
        lo, hi = fit.design.rescale[j]
        B = basis.evaluate(apply_rescale(x, lo, hi))
    g = groups[j]
    return (B - fit.design.column_means[g]) @ fit.beta[g]
