"""Proximal solver for group-structured sparse regression.

Minimizes ``0.5 * ||y - Z b||^2 + lam * Omega(b)`` where ``Omega`` is one of

* ``coop``  : sum_j w_j (||b_j+|| + ||b_j-||), the sign-coherent group norm;
* ``group`` : sum_j w_j ||b_j||, the usual group-lasso norm;
* ``l1``    : sum_j w_j ||b_j||_1, the (weighted) lasso.

``b_j+`` and ``b_j-`` are the elementwise positive and negative parts of the
block ``b_j``.  The coop norm is what makes selected I-spline components
monotone: it forces every selected block to carry one sign, so the fitted
curve is a nonnegative (or nonpositive) combination of nondecreasing basis
functions.

All three penalties have closed-form proximal maps, so the solver is an
accelerated proximal-gradient loop (FISTA) with monotone restarts: whenever
the accelerated step would increase the objective, the momentum is reset and
a plain gradient step is taken instead, doubling the step Lipschitz estimate
if even that fails.  Groups with infinite weight are removed from the
problem up front and pinned to zero, which is how the adaptive second stage
enforces exclusion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PenaltySpec",
    "SolverConfig",
    "SolverResult",
    "coop_norm",
    "group_soft_threshold",
    "prox_coop",
    "prox_l1",
    "penalty_value",
    "solve",
    "lambda_max",
    "lambda_path",
    "kkt_residual",
    "sign_coherence_check",
]

SIGN_TOL = 1e-10


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty kind, group layout, per-group weights and strength.

    Parameters
    ----------
    kind : {"coop", "group", "l1"}
    groups : tuple of slice
        Contiguous, non-overlapping column blocks in ascending order.
    weights : array_like
        One positive weight per group; ``inf`` pins the group to zero.
        At least one weight must be finite.
    lam : float
        Penalty strength, >= 0.
    """

    kind: str
    groups: tuple
    weights: np.ndarray = field(compare=False)
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in ("coop", "group", "l1"):
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        groups = tuple(self.groups)
        object.__setattr__(self, "groups", groups)
        stop = None
        for g in groups:
            if not isinstance(g, slice) or g.step not in (None, 1):
                raise ValueError("groups must be unit-step slices")
            if stop is not None and g.start != stop:
                raise ValueError("group slices must be contiguous and ordered")
            if g.stop <= g.start:
                raise ValueError("empty group slice")
            stop = g.stop
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size != len(groups):
            raise ValueError(
                f"{w.size} weights for {len(groups)} groups"
            )
        if np.any(np.isnan(w)) or np.any(w <= 0):
            raise ValueError("weights must be positive (inf allowed)")
        if not np.any(np.isfinite(w)):
            raise ValueError("at least one group weight must be finite")
        object.__setattr__(self, "weights", w)
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lam must be a finite nonnegative real, got {self.lam}")

    @property
    def n_columns(self) -> int:
        return self.groups[-1].stop


@dataclass(frozen=True)
class SolverConfig:
    """Iteration, tolerance and scaling knobs for :func:`solve`.

    ``normalized=True`` solves the 1/(2n)-scaled least squares problem,
    which is the same problem as the unscaled one at ``lam * n``; results
    (objective, kkt) are reported on the scale that was asked for.

    ``kkt_tol``, when set, keeps iterating after the objective/step
    criteria are met until the optimality residual drops below
    ``kkt_tol * lam`` (ignored at lam = 0).  This turns the stopping rule
    into an optimality certificate instead of a stagnation heuristic.
    """

    max_iterations: int = 50_000
    rel_obj_tol: float = 1e-8
    rel_step_tol: float = 1e-6
    lipschitz: str = "power"
    normalized: bool = False
    kkt_tol: float | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.rel_obj_tol <= 0 or self.rel_step_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.lipschitz not in ("power", "backtracking"):
            raise ValueError(f"unknown lipschitz mode {self.lipschitz!r}")
        if self.kkt_tol is not None and self.kkt_tol <= 0:
            raise ValueError("kkt_tol must be positive when set")


@dataclass
class SolverResult:
    """Converged (or flagged) solution of one penalized problem."""

    beta: np.ndarray
    objective: float
    iterations: int
    converged: bool
    kkt: float
    sign_coherent: np.ndarray
    lam: float


# ---------------------------------------------------------------------------
# penalty values and proximal maps


def _pos(v: np.ndarray) -> np.ndarray:
    return np.maximum(v, 0.0)


def group_soft_threshold(v, t: float) -> np.ndarray:
    """Shrink the whole vector toward 0: ``v * max(0, 1 - t/||v||)``."""
    v = np.asarray(v, dtype=float)
    nv = float(np.linalg.norm(v))
    if nv <= t:
        return np.zeros_like(v)
    return v * (1.0 - t / nv)


def prox_coop(v, t: float) -> np.ndarray:
    """Proximal map of ``t * (||b+|| + ||b-||)``.

    The objective splits over the positive and negative supports of ``v``
    (no coordinate ever crosses zero), so the map is a group soft threshold
    applied to each part separately.
    """
    v = np.asarray(v, dtype=float)
    return group_soft_threshold(_pos(v), t) - group_soft_threshold(_pos(-v), t)


def prox_l1(v, t: float) -> np.ndarray:
    """Coordinatewise soft threshold ``sign(v) * max(0, |v| - t)``."""
    v = np.asarray(v, dtype=float)
    return np.sign(v) * _pos(np.abs(v) - t)


def coop_norm(beta, groups, weights) -> float:
    """Weighted sign-split norm ``sum_j w_j (||b_j+|| + ||b_j-||)``.

    Groups with infinite weight contribute 0 when their block is zero and
    ``inf`` otherwise.
    """
    beta = np.asarray(beta, dtype=float)
    weights = np.asarray(weights, dtype=float)
    total = 0.0
    for g, w in zip(groups, weights):
        bj = beta[g]
        val = np.linalg.norm(_pos(bj)) + np.linalg.norm(_pos(-bj))
        if not np.isfinite(w):
            if val > 0.0:
                return float("inf")
            continue
        total += w * val
    return total


def penalty_value(beta, penalty: PenaltySpec) -> float:
    """Evaluate ``Omega(beta)`` for the given penalty (without ``lam``)."""
    beta = np.asarray(beta, dtype=float)
    total = 0.0
    for g, w in zip(penalty.groups, penalty.weights):
        bj = beta[g]
        if penalty.kind == "coop":
            val = np.linalg.norm(_pos(bj)) + np.linalg.norm(_pos(-bj))
        elif penalty.kind == "group":
            val = np.linalg.norm(bj)
        else:
            val = np.abs(bj).sum()
        if not np.isfinite(w):
            if val > 0.0:
                return float("inf")
            continue
        total += w * val
    return float(total)


# Row-parallel prox maps used inside the solver loop when every group has
# the same width: V has one group per row, t one threshold per row.


def _gst_rows(V: np.ndarray, t: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.einsum("ij,ij->i", V, V))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > t, 1.0 - t / np.where(norms > 0, norms, 1.0), 0.0)
    return V * scale[:, None]


def _prox_rows(V: np.ndarray, t: np.ndarray, kind: str) -> np.ndarray:
    if kind == "coop":
        return _gst_rows(_pos(V), t) - _gst_rows(_pos(-V), t)
    if kind == "group":
        return _gst_rows(V, t)
    return np.sign(V) * _pos(np.abs(V) - t[:, None])


def _prox_loop(v: np.ndarray, groups, t: np.ndarray, kind: str) -> np.ndarray:
    out = np.empty_like(v)
    for g, tj in zip(groups, t):
        if kind == "coop":
            out[g] = prox_coop(v[g], tj)
        elif kind == "group":
            out[g] = group_soft_threshold(v[g], tj)
        else:
            out[g] = prox_l1(v[g], tj)
    return out


# ---------------------------------------------------------------------------
# optimality certificates


def _dual_stats(kind: str, g: np.ndarray, groups, weights: np.ndarray) -> np.ndarray:
    """Weighted dual-norm statistic of a gradient, one value per group.

    The statistic is the largest lam at which the group could sit at zero:
    coop  : max(||g_j+||, ||g_j-||) / w_j
    group : ||g_j|| / w_j
    l1    : ||g_j||_inf / w_j
    Groups with infinite weight report 0 (they are excluded by constraint).
    """
    sizes = np.array([gs.stop - gs.start for gs in groups])
    if sizes.size and sizes.min() == sizes.max():
        G = g.reshape(len(groups), int(sizes[0]))
        if kind == "coop":
            Gp, Gn = _pos(G), _pos(-G)
            val = np.maximum(
                np.sqrt(np.einsum("ij,ij->i", Gp, Gp)),
                np.sqrt(np.einsum("ij,ij->i", Gn, Gn)),
            )
        elif kind == "group":
            val = np.sqrt(np.einsum("ij,ij->i", G, G))
        else:
            val = np.abs(G).max(axis=1)
    else:
        val = np.empty(len(groups))
        for i, gs in enumerate(groups):
            gj = g[gs]
            if kind == "coop":
                val[i] = max(np.linalg.norm(_pos(gj)), np.linalg.norm(_pos(-gj)))
            elif kind == "group":
                val[i] = np.linalg.norm(gj)
            else:
                val[i] = np.abs(gj).max()
    stats = val / weights
    stats[~np.isfinite(weights)] = 0.0
    return stats


def lambda_max(Z, y, penalty: PenaltySpec) -> float:
    """Smallest lam at which the all-zero solution is optimal.

    The max over groups of the dual-norm statistic of Z'y (see
    :func:`_dual_stats` for the per-penalty forms).
    """
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    g = Z.T @ y
    stats = _dual_stats(penalty.kind, g, penalty.groups, penalty.weights)
    return float(stats.max()) if stats.size else 0.0


def _coop_group_kkt(gj: np.ndarray, bj: np.ndarray, lw: float) -> float:
    """Worst subgradient violation for one coop group at strength lw."""
    pos = bj > 0.0
    neg = bj < 0.0
    zero = ~(pos | neg)
    worst = 0.0
    if pos.any():
        npos = np.linalg.norm(bj[pos])
        worst = max(worst, np.linalg.norm(gj[pos] - lw * bj[pos] / npos))
    if neg.any():
        nneg = np.linalg.norm(bj[neg])
        worst = max(worst, np.linalg.norm(gj[neg] - lw * bj[neg] / nneg))
    if zero.any():
        gz = gj[zero]
        if pos.any() and neg.any():
            # both sign parts active: the subgradient is pinned, the
            # gradient must vanish on the zero coordinates
            worst = max(worst, np.linalg.norm(gz))
        else:
            up = np.linalg.norm(_pos(gz))
            down = np.linalg.norm(_pos(-gz))
            if pos.any():
                # joining the active positive part is free at the margin,
                # so any positive gradient on a zero coordinate violates;
                # the negative direction still pays the full threshold
                worst = max(worst, up, max(0.0, down - lw))
            elif neg.any():
                worst = max(worst, down, max(0.0, up - lw))
            else:
                worst = max(worst, max(0.0, up - lw), max(0.0, down - lw))
    return worst


def _group_violation(kind: str, gj: np.ndarray, bj: np.ndarray, lw: float) -> float:
    if kind == "coop":
        return _coop_group_kkt(gj, bj, lw)
    if kind == "group":
        nb = np.linalg.norm(bj)
        if nb > 0.0:
            return float(np.linalg.norm(gj - lw * bj / nb))
        return max(0.0, float(np.linalg.norm(gj)) - lw)
    active = bj != 0.0
    worst = 0.0
    if active.any():
        worst = float(np.abs(gj[active] - lw * np.sign(bj[active])).max())
    if (~active).any():
        worst = max(worst, max(0.0, float(np.abs(gj[~active]).max()) - lw))
    return worst


def _violation_over_groups(kind, g, beta, groups, weights, lam) -> float:
    worst = 0.0
    for gj_slice, w in zip(groups, weights):
        if not np.isfinite(w):
            continue
        worst = max(
            worst,
            _group_violation(kind, g[gj_slice], beta[gj_slice], lam * w),
        )
    return worst


def kkt_residual(Z, y, beta, penalty: PenaltySpec) -> float:
    """Maximum violation of the stationarity conditions at ``beta``.

    Zero for an exact minimizer.  Groups with infinite weight are excluded
    by constraint rather than by subgradient and contribute 0.
    """
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    beta = np.asarray(beta, dtype=float).ravel()
    g = Z.T @ (y - Z @ beta)
    return float(
        _violation_over_groups(
            penalty.kind, g, beta, penalty.groups, penalty.weights, penalty.lam
        )
    )


def sign_coherence_check(beta, groups, tol: float = SIGN_TOL) -> np.ndarray:
    """Flag each group: True when its coefficients carry a single sign.

    A group is incoherent when it holds both a strictly positive and a
    strictly negative coefficient (beyond ``tol``); an incoherent I-spline
    block means the fitted component is not guaranteed monotone.
    """
    beta = np.asarray(beta, dtype=float)
    flags = np.empty(len(groups), dtype=bool)
    for i, g in enumerate(groups):
        bj = beta[g]
        flags[i] = not ((bj > tol).any() and (bj < -tol).any())
    return flags


# ---------------------------------------------------------------------------
# the solver


def _power_lipschitz(Z: np.ndarray, iters: int = 20, safety: float = 1.1) -> float:
    rng = np.random.default_rng(0)
    v = rng.standard_normal(Z.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 1.0
    v /= nv
    est = 1.0
    for _ in range(iters):
        w = Z.T @ (Z @ v)
        est = np.linalg.norm(w)
        if est <= 1e-300:
            return 1.0
        v = w / est
    return float(est * safety)


def solve(
    Z,
    y,
    penalty: PenaltySpec,
    cfg: SolverConfig | None = None,
    warm_start=None,
) -> SolverResult:
    """Minimize ``0.5||y - Zb||^2 + lam * Omega(b)`` (FISTA with restarts).

    Parameters
    ----------
    Z : ndarray, shape (n, p)
        Column-centered design.
    y : ndarray, shape (n,)
        Centered response.
    penalty : PenaltySpec
        Norm, groups, weights and strength.  Infinite-weight groups are
        dropped from the problem and returned as exact zeros.
    cfg : SolverConfig, optional
    warm_start : ndarray, optional
        Full-length initial point (infinite-weight blocks are ignored).

    Returns
    -------
    SolverResult
        With ``converged=False`` when the iteration budget ran out.
    """
    if cfg is None:
        cfg = SolverConfig()
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = Z.shape
    if y.size != n:
        raise ValueError(f"y has {y.size} entries for {n} rows of Z")
    if penalty.n_columns != p:
        raise ValueError(
            f"penalty covers {penalty.n_columns} columns, Z has {p}"
        )

    scale = 1.0 / n if cfg.normalized else 1.0
    lam = penalty.lam * n if cfg.normalized else penalty.lam

    finite = np.isfinite(penalty.weights)
    live_groups = [g for g, ok in zip(penalty.groups, finite) if ok]
    w_live = penalty.weights[finite]
    sizes = np.array([g.stop - g.start for g in live_groups])
    cols = np.concatenate([np.arange(g.start, g.stop) for g in live_groups])
    Za = Z[:, cols] if cols.size < p else Z
    pa = cols.size

    # group layout inside the reduced problem
    stops = np.cumsum(sizes)
    red_groups = [slice(int(s - z), int(s)) for s, z in zip(stops, sizes)]
    uniform = sizes.min() == sizes.max()
    m = int(sizes[0]) if uniform else 0

    def prox(v: np.ndarray, tvec: np.ndarray) -> np.ndarray:
        if uniform:
            return _prox_rows(v.reshape(-1, m), tvec, penalty.kind).ravel()
        return _prox_loop(v, red_groups, tvec, penalty.kind)

    def pen(b: np.ndarray) -> float:
        total = 0.0
        if uniform:
            B = b.reshape(-1, m)
            if penalty.kind == "coop":
                vals = np.sqrt(np.einsum("ij,ij->i", _pos(B), _pos(B)))
                vals = vals + np.sqrt(np.einsum("ij,ij->i", _pos(-B), _pos(-B)))
            elif penalty.kind == "group":
                vals = np.sqrt(np.einsum("ij,ij->i", B, B))
            else:
                vals = np.abs(B).sum(axis=1)
            return float(vals @ w_live)
        for g, w in zip(red_groups, w_live):
            bj = b[g]
            if penalty.kind == "coop":
                total += w * (np.linalg.norm(_pos(bj)) + np.linalg.norm(_pos(-bj)))
            elif penalty.kind == "group":
                total += w * np.linalg.norm(bj)
            else:
                total += w * np.abs(bj).sum()
        return total

    if cfg.lipschitz == "power":
        L = _power_lipschitz(Za)
    else:
        L = 1.0

    x = np.zeros(pa)
    if warm_start is not None:
        ws = np.asarray(warm_start, dtype=float).ravel()
        if ws.size != p:
            raise ValueError(f"warm start has {ws.size} entries, expected {p}")
        x = ws[cols].copy()

    Zx = Za @ x
    obj = 0.5 * float(np.dot(y - Zx, y - Zx)) + lam * pen(x)
    x_old = x
    Zx_old = Zx
    t_mom = 1.0
    t_prev = 1.0
    iterations = 0
    converged = False

    for iterations in range(1, cfg.max_iterations + 1):
        tvec = (lam / L) * w_live
        c = (t_prev - 1.0) / t_mom
        if c != 0.0:
            v = x + c * (x - x_old)
            Zv = Zx + c * (Zx - Zx_old)
        else:
            v = x
            Zv = Zx
        grad = Za.T @ (Zv - y)
        x_new = prox(v - grad / L, tvec)
        Zx_new = Za @ x_new
        r = y - Zx_new
        obj_new = 0.5 * float(np.dot(r, r)) + lam * pen(x_new)

        if obj_new > obj:
            # momentum overshoot: reset and take a plain gradient step,
            # doubling L until the step is a descent step
            t_mom = 1.0
            while True:
                grad = Za.T @ (Zx - y)
                x_new = prox(x - grad / L, (lam / L) * w_live)
                Zx_new = Za @ x_new
                r = y - Zx_new
                obj_new = 0.5 * float(np.dot(r, r)) + lam * pen(x_new)
                if obj_new <= obj or L > 1e30:
                    break
                L *= 2.0
            if obj_new > obj:
                # numerically stalled at the optimum
                converged = True
                break

        rel_obj = (obj - obj_new) / max(1.0, abs(obj))
        rel_step = np.linalg.norm(x_new - x) / max(1.0, np.linalg.norm(x))

        x_old, Zx_old = x, Zx
        x, Zx, obj = x_new, Zx_new, obj_new
        t_prev = t_mom
        t_mom = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom * t_mom))

        if rel_obj < cfg.rel_obj_tol and rel_step < cfg.rel_step_tol:
            if cfg.kkt_tol is not None and lam > 0.0:
                g_here = Za.T @ (y - Zx)
                viol = _violation_over_groups(
                    penalty.kind, g_here, x, red_groups, w_live, lam
                )
                if viol > cfg.kkt_tol * lam:
                    continue
            converged = True
            break

    beta = np.zeros(p)
    beta[cols] = x
    kkt = kkt_residual(
        Z, y, beta,
        PenaltySpec(penalty.kind, penalty.groups, penalty.weights, lam),
    )
    return SolverResult(
        beta=beta,
        objective=float(scale * obj),
        iterations=iterations,
        converged=converged,
        kkt=float(scale * kkt),
        sign_coherent=sign_coherence_check(beta, penalty.groups),
        lam=penalty.lam,
    )


def _group_nonzero_mask(beta: np.ndarray, groups) -> np.ndarray:
    return np.array([bool(np.any(beta[g] != 0.0)) for g in groups])


def _solve_screened(Z, y, penalty, lam, cfg, beta, stats, lam_ref):
    """Solve one path point on a strong-rule candidate set, then verify.

    ``beta`` is the warm start (the solution at ``lam_ref``) and ``stats``
    the per-group dual statistics of its gradient.  Groups whose statistic
    falls below the sequential threshold ``2*lam - lam_ref`` are held at
    zero and the problem is solved over the survivors only; afterwards the
    optimality condition of every skipped group is checked exactly and any
    violator is added back and the point re-solved.  The result therefore
    optimizes the full problem; screening only changes the work done.
    Returns the full-size result and the dual statistics at the solution.
    """
    kind, groups, weights = penalty.kind, penalty.groups, penalty.weights
    p = penalty.n_columns
    finite = np.isfinite(weights)
    # strict inequality: at lam = lambda_max the boundary group sits exactly
    # on the threshold and the solution is exactly zero, which the
    # verification step below confirms without solving
    keep = finite & ((stats > 2.0 * lam - lam_ref) | _group_nonzero_mask(beta, groups))
    total_iterations = 0
    converged = True
    beta_new = np.zeros(p)
    for _ in range(len(groups) + 1):
        if keep.any():
            kept = np.flatnonzero(keep)
            cols = np.concatenate([np.arange(groups[i].start, groups[i].stop) for i in kept])
            sizes = [groups[i].stop - groups[i].start for i in kept]
            stops = np.cumsum(sizes)
            red_groups = tuple(slice(int(e - s), int(e)) for e, s in zip(stops, sizes))
            red = solve(
                Z[:, cols],
                y,
                PenaltySpec(kind, red_groups, weights[kept], lam),
                cfg=cfg,
                warm_start=beta[cols],
            )
            total_iterations += red.iterations
            converged = red.converged
            beta_new = np.zeros(p)
            beta_new[cols] = red.beta
            resid = y - Z[:, cols] @ red.beta
            objective = red.objective
        else:
            beta_new = np.zeros(p)
            resid = y.copy()
            objective = 0.5 * float(resid @ resid)
        g_cur = Z.T @ resid
        stats = _dual_stats(kind, g_cur, groups, weights)
        violators = finite & ~keep & (stats > lam * (1.0 + 1e-10))
        if not violators.any():
            break
        keep |= violators
        beta = beta_new
    excluded = finite & ~keep
    kkt = float(np.max(weights[excluded] * np.maximum(0.0, stats[excluded] - lam), initial=0.0))
    for i in np.flatnonzero(keep):
        gs = groups[i]
        kkt = max(kkt, _group_violation(kind, g_cur[gs], beta_new[gs], lam * weights[i]))
    result = SolverResult(
        beta=beta_new,
        objective=float(objective),
        iterations=total_iterations,
        converged=converged,
        kkt=float(kkt),
        sign_coherent=sign_coherence_check(beta_new, groups),
        lam=lam,
    )
    return result, stats


def lambda_path(
    Z,
    y,
    penalty: PenaltySpec,
    grid_size: int = 100,
    ratio: float = 1e-3,
    cfg: SolverConfig | None = None,
    lambdas=None,
    screen: bool = True,
) -> list[SolverResult]:
    """Solve along a decreasing log-spaced grid with warm starts.

    The grid runs from ``lambda_max`` (where the solution is exactly zero)
    down to ``ratio * lambda_max``; ``penalty.lam`` is ignored.  A custom
    decreasing grid can be supplied via ``lambdas``.

    With ``screen=True`` each point is solved over a strong-rule candidate
    set with exact optimality verification of the skipped groups (see
    :func:`_solve_screened`), which is much faster when most groups stay
    inactive and gives the same solutions.
    """
    if cfg is None:
        cfg = SolverConfig()
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    g0 = Z.T @ y
    stats = _dual_stats(penalty.kind, g0, penalty.groups, penalty.weights)
    local_max = float(stats.max()) if stats.size else 0.0
    if lambdas is None:
        if local_max <= 0.0:
            lambdas = np.zeros(grid_size)
        else:
            lambdas = local_max * np.power(ratio, np.linspace(0.0, 1.0, grid_size))
    lambdas = np.asarray(lambdas, dtype=float)

    if cfg.normalized or not screen:
        results = []
        warm = None
        for lam in lambdas:
            pen = PenaltySpec(penalty.kind, penalty.groups, penalty.weights, float(lam))
            res = solve(Z, y, pen, cfg=cfg, warm_start=warm)
            warm = res.beta
            results.append(res)
        return results

    results = []
    beta = np.zeros(penalty.n_columns)
    # beta = 0 is the exact solution for any lam >= local_max, which anchors
    # the sequential rule at the first grid point
    lam_ref = max(local_max, float(lambdas[0]) if lambdas.size else 0.0)
    for lam in lambdas:
        res, stats = _solve_screened(
            Z, y, penalty, float(lam), cfg, beta, stats, lam_ref
        )
        beta = res.beta
        lam_ref = float(lam)
        results.append(res)
    return results
