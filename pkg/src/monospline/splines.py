"""Monotone (I-), M- and B-spline bases on the unit interval.

All bases live on [0, 1] with clamped knot vectors: ``order`` copies of the
boundary knots at 0 and 1 enclose ``interior_count`` equally spaced interior
knots.  M-splines are nonnegative and integrate to one, I-splines are their
running integrals (nondecreasing, 0 at the left boundary, 1 at the right),
and B-splines are the usual normalized partition-of-unity basis.

Basis indices ``k`` are 1-based, matching the usual spline literature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KnotVector",
    "BasisSpec",
    "make_knots",
    "mspline_eval",
    "ispline_eval",
    "bspline_eval",
    "rescale_to_unit",
    "apply_rescale",
]


@dataclass(frozen=True)
class KnotVector:
    """Clamped knot sequence on [0, 1].

    Parameters
    ----------
    order : int
        Spline order ``l`` (>= 1).  The boundary knots 0 and 1 are each
        repeated ``order`` times.
    interior_count : int
        Number of interior knots ``K`` (>= 0), all strictly inside (0, 1).
    knots : tuple of float
        Full nondecreasing sequence of length ``K + 2 * order``.

    The basis built on this sequence has ``m = K + order`` members.
    """

    order: int
    interior_count: int
    knots: tuple[float, ...] = field(default=())

    def __post_init__(self):
        l, K = self.order, self.interior_count
        if l < 1:
            raise ValueError(f"order must be >= 1, got {l}")
        if K < 0:
            raise ValueError(f"interior_count must be >= 0, got {K}")
        t = np.asarray(self.knots, dtype=float)
        if t.shape != (K + 2 * l,):
            raise ValueError(
                f"expected {K + 2 * l} knots for order={l}, K={K}, got {t.size}"
            )
        if np.any(np.diff(t) < 0):
            raise ValueError("knots must be nondecreasing")
        if np.any(t[:l] != 0.0) or np.any(t[-l:] != 1.0):
            raise ValueError("boundary knots must be 0 and 1, each with multiplicity order")
        interior = t[l:-l]
        if interior.size and (interior.min() <= 0.0 or interior.max() >= 1.0):
            raise ValueError("interior knots must lie strictly inside (0, 1)")

    @property
    def m(self) -> int:
        """Number of basis functions ``K + order``."""
        return self.interior_count + self.order

    def as_array(self) -> np.ndarray:
        return np.asarray(self.knots, dtype=float)


def make_knots(interior_count: int, order: int) -> KnotVector:
    """Build the clamped knot vector with equally spaced interior knots.

    Interior knots sit at ``i / (K + 1)`` for ``i = 1, ..., K``.

    >>> make_knots(1, 2).knots
    (0.0, 0.0, 0.5, 1.0, 1.0)
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if interior_count < 0:
        raise ValueError(f"interior_count must be >= 0, got {interior_count}")
    interior = [i / (interior_count + 1) for i in range(1, interior_count + 1)]
    knots = tuple([0.0] * order + interior + [1.0] * order)
    return KnotVector(order=order, interior_count=interior_count, knots=knots)


def _check_index(kv: KnotVector, k: int) -> None:
    if not 1 <= k <= kv.m:
        raise IndexError(f"basis index k={k} out of range 1..{kv.m}")


def _mspline_rec(t: np.ndarray, k: int, order: int, x: np.ndarray) -> np.ndarray:
    # k is 1-based; support [t_k, t_{k+order}], half-open at order 1 so that
    # interior knots are not double-counted, closed at the right domain end.
    tk = t[k - 1]
    tkl = t[k - 1 + order]
    out = np.zeros_like(x)
    if tkl <= tk:
        return out
    if order == 1:
        mask = (x >= tk) & (x < tkl)
        if tkl == t[-1]:
            mask |= x == tkl
        out[mask] = 1.0 / (tkl - tk)
        return out
    mask = (x >= tk) & (x <= tkl)
    if np.any(mask):
        xm = x[mask]
        a = (xm - tk) * _mspline_rec(t, k, order - 1, xm)
        b = (tkl - xm) * _mspline_rec(t, k + 1, order - 1, xm)
        out[mask] = order * (a + b) / ((order - 1) * (tkl - tk))
    return out


def mspline_eval(kv: KnotVector, k: int, x):
    """Evaluate the k-th M-spline (1-based) at ``x``.

    Order-1 M-splines are the normalized interval indicators
    ``1 / (t_{k+1} - t_k)`` on ``[t_k, t_{k+1})``; higher orders follow the
    standard recursion.  Each M-spline is nonnegative and integrates to 1.
    """
    _check_index(kv, k)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = _mspline_rec(kv.as_array(), k, kv.order, xa)
    return out[0] if np.isscalar(x) or np.ndim(x) == 0 else out


def _ispline2_closed(t: np.ndarray, k: int, x: np.ndarray) -> np.ndarray:
    # Order-2 I-spline on segment knots (t_k, t_{k+1}, t_{k+2}); piecewise
    # quadratic, continuous across degenerate (zero-length) spans.
    tk, tk1, tk2 = t[k - 1], t[k], t[k + 1]
    out = np.zeros_like(x)
    out[x > tk2] = 1.0
    if tk2 > tk1:
        mid = (x > tk1) & (x <= tk2)
        out[mid] = 1.0 - (tk2 - x[mid]) ** 2 / ((tk2 - tk) * (tk2 - tk1))
    if tk1 > tk:
        lo = (x > tk) & (x <= tk1)
        out[lo] = (x[lo] - tk) ** 2 / ((tk1 - tk) * (tk2 - tk))
    return out


def _simpson_integral(kv: KnotVector, k: int, upper: float, panels: int = 4096) -> float:
    # Composite Simpson of M_k on [0, upper]; testing path for order != 2.
    if upper <= 0.0:
        return 0.0
    grid = np.linspace(0.0, upper, 2 * panels + 1)
    vals = _mspline_rec(kv.as_array(), k, kv.order, grid)
    h = upper / (2 * panels)
    return float(h / 3.0 * (vals[0] + vals[-1] + 4 * vals[1::2].sum() + 2 * vals[2:-1:2].sum()))


def ispline_eval(kv: KnotVector, k: int, x):
    """Evaluate the k-th I-spline (1-based) at ``x``.

    The I-spline is the integral of the matching M-spline from the left
    boundary, hence nondecreasing with range [0, 1].  Order 2 uses the
    piecewise-quadratic closed form; other orders fall back to numerical
    integration of :func:`mspline_eval`.
    """
    _check_index(kv, k)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if kv.order == 2:
        out = _ispline2_closed(kv.as_array(), k, xa)
    else:
        out = np.array([_simpson_integral(kv, k, xi) for xi in xa])
        np.clip(out, 0.0, 1.0, out=out)
    return out[0] if np.isscalar(x) or np.ndim(x) == 0 else out


def _bspline_rec(t: np.ndarray, k: int, order: int, x: np.ndarray) -> np.ndarray:
    if order == 1:
        tk, tk1 = t[k - 1], t[k]
        out = np.zeros_like(x)
        if tk1 <= tk:
            return out
        mask = (x >= tk) & (x < tk1)
        if tk1 == t[-1]:
            mask |= x == tk1
        out[mask] = 1.0
        return out
    out = np.zeros_like(x)
    den_l = t[k - 1 + order - 1] - t[k - 1]
    den_r = t[k + order - 1] - t[k]
    if den_l > 0:
        out += (x - t[k - 1]) / den_l * _bspline_rec(t, k, order - 1, x)
    if den_r > 0:
        out += (t[k + order - 1] - x) / den_r * _bspline_rec(t, k + 1, order - 1, x)
    return out


def bspline_eval(kv: KnotVector, k: int, x):
    """Evaluate the k-th normalized B-spline (1-based) at ``x``.

    Standard Cox-de Boor recurrence; ``kv.order`` is the classical B-spline
    order (degree ``order - 1``), so order 1 gives interval indicators and
    the clamped knots yield a partition of unity on [0, 1].
    """
    _check_index(kv, k)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = _bspline_rec(kv.as_array(), k, kv.order, xa)
    return out[0] if np.isscalar(x) or np.ndim(x) == 0 else out


_EVALUATORS = {
    "ispline": ispline_eval,
    "bspline": bspline_eval,
}


@dataclass(frozen=True)
class BasisSpec:
    """A per-covariate basis: monotone I-splines, B-splines, or identity.

    The identity basis has a single member phi(x) = x and is what turns the
    penalized fits into plain linear models.
    """

    kind: str
    knot_vector: KnotVector | None = None

    def __post_init__(self):
        if self.kind not in ("ispline", "bspline", "identity"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind == "identity":
            if self.knot_vector is not None:
                raise ValueError("identity basis takes no knot vector")
        elif self.knot_vector is None:
            raise ValueError(f"{self.kind} basis requires a knot vector")

    @property
    def m(self) -> int:
        return 1 if self.kind == "identity" else self.knot_vector.m

    def evaluate(self, x) -> np.ndarray:
        """Evaluate all basis members at ``x``; returns shape (len(x), m)."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind == "identity":
            return xa[:, None].copy()
        fn = _EVALUATORS[self.kind]
        return np.column_stack([fn(self.knot_vector, k, xa) for k in range(1, self.m + 1)])


def rescale_to_unit(column) -> tuple[np.ndarray, tuple[float, float]]:
    """Min-max map a covariate column to [0, 1].

    Returns the transformed column and the (min, max) of the training
    values, kept for transforming new data later.  Constant columns are
    rejected since they carry no signal and would divide by zero.
    """
    col = np.asarray(column, dtype=float)
    if not np.all(np.isfinite(col)):
        raise ValueError("covariate column contains non-finite values")
    lo, hi = float(col.min()), float(col.max())
    if hi <= lo:
        raise ValueError(f"constant covariate column (min == max == {lo}); cannot rescale")
    return (col - lo) / (hi - lo), (lo, hi)


def apply_rescale(column, lo: float, hi: float) -> np.ndarray:
    """Apply stored (min, max) to new data, clamping into [0, 1].

    Clamping keeps monotone components constant beyond the training range
    rather than extrapolating.
    """
    col = np.asarray(column, dtype=float)
    return np.clip((col - lo) / (hi - lo), 0.0, 1.0)
