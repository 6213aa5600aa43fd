"""Centered design matrices for additive spline regression.

Each covariate is rescaled onto [0, 1], expanded through a spline basis,
and the resulting columns are centered.  The rescale parameters and column
means are retained so that new data can be pushed through the identical
transformation at predict time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .splines import BasisSpec, apply_rescale, rescale_to_unit

__all__ = [
    "DesignMatrix",
    "build_design",
    "expand_new",
    "center_response",
]


@dataclass(frozen=True)
class DesignMatrix:
    """Column-centered basis expansion of an n x P covariate matrix.

    Attributes
    ----------
    Z : ndarray, shape (n, P*m)
        Centered design; covariate blocks sit side by side in covariate
        order, each of width ``basis.m``.
    groups : tuple of slice
        Column block of covariate ``j`` is ``Z[:, groups[j]]``.
    column_means : ndarray, shape (P*m,)
        Means subtracted from the raw basis columns.
    basis : BasisSpec
        Per-covariate expansion shared by all blocks.
    rescale : tuple of (float, float)
        Per-covariate (lo, hi) mapping raw values onto [0, 1].
    y_mean : float or None
        Response mean when the response was centered alongside; acts as
        the intercept at predict time.
    """

    Z: np.ndarray
    groups: tuple
    column_means: np.ndarray
    basis: BasisSpec
    rescale: tuple
    y_mean: float | None = None

    @property
    def n_covariates(self) -> int:
        return len(self.groups)

    @property
    def shape(self) -> tuple[int, int]:
        return self.Z.shape


def _expand(X: np.ndarray, basis: BasisSpec, rescale: tuple) -> np.ndarray:
    # Spline bases live on [0, 1], so their inputs go through the stored
    # min-max map (with clamping).  The identity basis keeps raw values:
    # a linear term has no domain constraint and should extrapolate.
    n, P = X.shape
    m = basis.m
    raw = np.empty((n, P * m))
    for j in range(P):
        if basis.kind == "identity":
            xj = X[:, j]
        else:
            lo, hi = rescale[j]
            xj = apply_rescale(X[:, j], lo, hi)
        raw[:, j * m : (j + 1) * m] = basis.evaluate(xj)
    return raw


def build_design(X, basis: BasisSpec) -> DesignMatrix:
    """Rescale, expand and center an n x P covariate matrix.

    Parameters
    ----------
    X : array_like, shape (n, P)
        Raw covariates, n >= 2.  Constant or non-finite columns are
        rejected.
    basis : BasisSpec
        Expansion applied to every covariate.

    Returns
    -------
    DesignMatrix
        Centered design with the rescale parameters and column means
        needed to expand new data.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d covariate matrix, got ndim={X.ndim}")
    n, P = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 rows to build a design, got {n}")
    if P < 1:
        raise ValueError("need at least one covariate column")

    rescale = []
    for j in range(P):
        try:
            _, (lo, hi) = rescale_to_unit(X[:, j])
        except ValueError as exc:
            raise ValueError(f"covariate column {j}: {exc}") from None
        rescale.append((lo, hi))
    rescale = tuple(rescale)

    raw = _expand(X, basis, rescale)
    column_means = raw.mean(axis=0)
    Z = raw - column_means
    m = basis.m
    groups = tuple(slice(j * m, (j + 1) * m) for j in range(P))
    return DesignMatrix(
        Z=Z,
        groups=groups,
        column_means=column_means,
        basis=basis,
        rescale=rescale,
    )


def expand_new(X_new, design: DesignMatrix) -> np.ndarray:
    """Expand new covariate rows with the training transformation.

    Rescale parameters and column means come from the training design and
    are never recomputed; values outside the training range are clamped
    by the stored rescale map.
    """
    X_new = np.asarray(X_new, dtype=float)
    if X_new.ndim == 1:
        X_new = X_new[None, :]
    if X_new.ndim != 2:
        raise ValueError(f"expected a 2-d covariate matrix, got ndim={X_new.ndim}")
    P = design.n_covariates
    if X_new.shape[1] != P:
        raise ValueError(
            f"column count mismatch: design has {P} covariates, "
            f"got {X_new.shape[1]}"
        )
    raw = _expand(X_new, design.basis, design.rescale)
    return raw - design.column_means


def center_response(y) -> tuple[np.ndarray, float]:
    """Remove the mean from a response vector.

    Returns the centered vector and the removed mean, which serves as the
    model intercept.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.size < 2:
        raise ValueError(f"need at least 2 observations, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise ValueError("response contains non-finite values")
    y_mean = float(y.mean())
    return y - y_mean, y_mean
