"""K-fold cross-validation for the penalty strength.

The curve CV(lam) = (1/n) sum_k sum_{i in fold k} (y_i - yhat_i^{-k}(lam))^2
is computed over a shared decreasing grid.  Everything data-dependent --
covariate rescaling, basis centering, response centering -- is recomputed
inside each training fold, so no statistic of a held-out point ever touches
the model that predicts it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import build_design, center_response, expand_new
from .solver import PenaltySpec, SolverConfig, lambda_path

__all__ = ["CVResult", "kfold_split", "cv_curve", "select_lambda"]


@dataclass(frozen=True)
class CVResult:
    """Cross-validation curve and the strength it selects."""

    lambdas: np.ndarray
    cv_values: np.ndarray
    lam: float
    seed: int

    def __post_init__(self):
        lams = np.asarray(self.lambdas, dtype=float)
        vals = np.asarray(self.cv_values, dtype=float)
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "cv_values", vals)
        if lams.size != vals.size:
            raise ValueError("grid and CV values differ in length")
        if lams.size > 1 and not np.all(np.diff(lams) < 0):
            raise ValueError("lambda grid must be strictly decreasing")
        if np.any(vals < 0):
            raise ValueError("CV values must be nonnegative")
        where = np.flatnonzero(lams == self.lam)
        if where.size == 0 or vals[where[0]] > vals.min():
            raise ValueError("chosen lambda does not attain the minimum")


def kfold_split(n: int, K: int = 10, seed: int = 0) -> np.ndarray:
    """Assign each of n observations to one of K folds.

    Fold sizes are floor(n/K) or ceil(n/K) (the remainder spread over the
    first folds); the assignment is a seeded random permutation.
    """
    if K < 2:
        raise ValueError(f"need at least 2 folds, got K={K}")
    if K > n:
        raise ValueError(f"more folds ({K}) than observations ({n})")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    sizes = np.full(K, n // K)
    sizes[: n % K] += 1
    fold_of = np.empty(n, dtype=int)
    start = 0
    for k, s in enumerate(sizes):
        fold_of[perm[start : start + s]] = k
        start += s
    return fold_of


def select_lambda(lambdas, cv_values=None) -> float:
    """Grid value minimizing CV; ties go to the larger (sparser) lambda.

    Accepts either a :class:`CVResult` or the (grid, values) pair.
    """
    if isinstance(lambdas, CVResult):
        cv_values = lambdas.cv_values
        lambdas = lambdas.lambdas
    lambdas = np.asarray(lambdas, dtype=float)
    cv_values = np.asarray(cv_values, dtype=float)
    # the grid is decreasing, so the first minimizer is the largest lambda
    return float(lambdas[int(np.argmin(cv_values))])


def cv_curve(
    X,
    y,
    basis,
    kind: str,
    weights,
    lambdas,
    K: int = 10,
    seed: int = 0,
    folds=None,
    cfg: SolverConfig | None = None,
) -> CVResult:
    """Cross-validate one penalized method over a fixed lambda grid.

    Parameters
    ----------
    X, y : training data (raw covariates; y is centered per fold)
    basis : BasisSpec applied to every covariate
    kind : {"coop", "group", "l1"} penalty
    weights : per-covariate group weights (inf excludes the group)
    lambdas : decreasing grid shared by all folds
    K, seed : fold count and assignment seed
    folds : optional explicit fold index per observation (overrides K/seed)
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n = y.size
    lambdas = np.asarray(lambdas, dtype=float)
    if folds is None:
        folds = kfold_split(n, K, seed)
    else:
        folds = np.asarray(folds, dtype=int)
        if folds.size != n:
            raise ValueError("fold assignment length does not match data")
    fold_ids = np.unique(folds)
    counts = np.bincount(folds)
    if counts[counts > 0].min() < 2:
        raise ValueError("every fold needs at least 2 observations")

    sse = np.zeros(lambdas.size)
    for k in fold_ids:
        test = folds == k
        train = ~test
        design = build_design(X[train], basis)
        y_tr, y_mean = center_response(y[train])
        pen = PenaltySpec(kind, design.groups, weights)
        path = lambda_path(design.Z, y_tr, pen, cfg=cfg, lambdas=lambdas)
        Z_test = expand_new(X[test], design)
        for i, res in enumerate(path):
            pred = y_mean + Z_test @ res.beta
            err = y[test] - pred
            sse[i] += float(err @ err)

    cv_values = sse / n
    return CVResult(
        lambdas=lambdas,
        cv_values=cv_values,
        lam=select_lambda(lambdas, cv_values),
        seed=seed,
    )
