"""Synthetic benchmark harness for the sparse monotone regression methods.

Covariates live on [0, 1] (standard normal truncated to the unit
interval) with an optional equicorrelation-style dependence: the active
block shares one latent draw, the inactive block another, mixed in with
parameter ``t_dep``.  Three signal shapes are built in:

* model "A"      : four smooth monotone components (two decreasing, two
                   increasing, one of them a steep logistic step).
* model "B"      : same but with the logistic step replaced by a linear
                   term, so one component is exactly linear.
* model "linear" : all four components linear with slopes (-2, -2, 2, 2).

A run draws ``replications`` data sets, fits the configured methods on
each (sharing CV folds within a replication so method comparisons are
paired), and aggregates support recovery and per-component estimation
error.  Everything is keyed off one integer seed; per-replication
streams are derived from (seed, stream, replication) counters so single
replications can be reproduced in isolation and run in parallel.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm

from .estimators import (
    FitResult,
    component_curve,
    component_values,
    fit_adaptive_lasso,
    fit_adaptive_ms_lasso,
    fit_bs_lasso,
    fit_lasso,
    fit_ms_lasso,
)
from .model_selection import kfold_split

__all__ = [
    "SimConfig",
    "SimReport",
    "sample_truncnorm01",
    "gen_covariates",
    "model_components",
    "true_component",
    "calibrate_sigma",
    "gen_response",
    "tp_fp",
    "component_mse",
    "monotonicity_audit",
    "run_experiment",
    "aggregate_records",
    "format_table",
]

METHODS = ("ms", "ams", "lasso", "alasso", "bs")
MODELS = ("A", "B", "linear")

# grid used when auditing fitted curves for monotonicity
AUDIT_GRID_SIZE = 1001


@dataclass(frozen=True)
class SimConfig:
    """One benchmark scenario.

    ``t_dep`` is the dependence mixing weight: covariate ij is
    (w_ij + t*u_i) / (1+t) with u shared inside the active set and an
    independent shared draw inside the inactive set.  ``snr`` is
    Var(signal)/sigma^2; sigma is calibrated by Monte Carlo.  ``active``
    lists the signal covariates (at most four; component shapes are
    taken from the model in order).
    """

    n: int = 50
    P: int = 1000
    t_dep: float = 0.0
    snr: float = 4.0
    model: str = "A"
    active: tuple = (0, 1, 2, 3)
    replications: int = 100
    seed: int = 0
    methods: tuple = ("ms", "ams")
    knots: int = 6
    order: int = 2
    folds: int = 10
    grid_size: int = 100
    grid_ratio: float = 1e-3
    jobs: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 observations, got n={self.n}")
        if self.t_dep < 0:
            raise ValueError(f"dependence parameter must be >= 0, got {self.t_dep}")
        if not self.snr > 0:
            raise ValueError(f"signal-to-noise ratio must be positive, got {self.snr}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        active = tuple(int(j) for j in self.active)
        object.__setattr__(self, "active", active)
        if not 1 <= len(active) <= 4:
            raise ValueError("active set must contain between 1 and 4 covariates")
        if len(set(active)) != len(active):
            raise ValueError(f"active set has repeats: {active}")
        if self.P < len(active):
            raise ValueError(f"P={self.P} smaller than the active set size")
        if any(not 0 <= j < self.P for j in active):
            raise ValueError(f"active indices out of range for P={self.P}: {active}")
        methods = tuple(self.methods)
        object.__setattr__(self, "methods", methods)
        if not methods:
            raise ValueError("no methods configured")
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {METHODS}")
        if len(set(methods)) != len(methods):
            raise ValueError(f"duplicate methods: {methods}")
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["active"] = list(self.active)
        d["methods"] = list(self.methods)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        for key in ("active", "methods"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def sample_truncnorm01(count, rng) -> np.ndarray:
    """Draw N(0,1) truncated to [0,1] by inverting the CDF.

    u ~ Uniform(Phi(0), Phi(1)), x = Phi^{-1}(u).
    """
    lo, hi = norm.cdf(0.0), norm.cdf(1.0)
    return norm.ppf(rng.uniform(lo, hi, size=count))


def gen_covariates(cfg: SimConfig, rng) -> np.ndarray:
    """Draw the (n, P) covariate matrix for one replication.

    Draw order is fixed (W, then the active-set latent u, then the
    inactive-set latent v) so streams line up across dependence levels.
    """
    W = sample_truncnorm01((cfg.n, cfg.P), rng)
    u = sample_truncnorm01(cfg.n, rng)
    v = sample_truncnorm01(cfg.n, rng)
    t = cfg.t_dep
    active = list(cfg.active)
    inactive = np.setdiff1d(np.arange(cfg.P), active)
    X = np.empty_like(W)
    X[:, active] = (W[:, active] + t * u[:, None]) / (1.0 + t)
    X[:, inactive] = (W[:, inactive] + t * v[:, None]) / (1.0 + t)
    return X


def _g1(x):
    return -np.exp(x**2)


def _g2(x):
    return -np.log(x + 0.1)


def _g3(x):
    return 2.0 * np.tanh(20.0 * x**2) + 0.5 * np.exp(x**3)


def _g4_step(x):
    e = np.exp(10.0 * x - 5.0)
    return 2.0 * e / (1.0 + e)


def _g4_linear(x):
    return 2.0 * np.asarray(x, dtype=float)


_LINEAR_SLOPES = (-2.0, -2.0, 2.0, 2.0)

_COMPONENTS = {
    "A": (_g1, _g2, _g3, _g4_step),
    "B": (_g1, _g2, _g3, _g4_linear),
    "linear": tuple((lambda x, b=b: b * np.asarray(x, dtype=float)) for b in _LINEAR_SLOPES),
}


def model_components(model: str):
    """The tuple of true component functions for a model id."""
    try:
        return _COMPONENTS[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}") from None


def true_component(model: str, k: int, x):
    """Evaluate true component k (position in the active set) of a model."""
    comps = model_components(model)
    if not 0 <= k < len(comps):
        raise IndexError(f"model {model!r} has {len(comps)} components, got k={k}")
    return comps[k](np.asarray(x, dtype=float))


def _signal(X: np.ndarray, model: str, active) -> np.ndarray:
    comps = model_components(model)
    total = np.zeros(X.shape[0])
    for k, j in enumerate(active):
        total += comps[k](X[:, j])
    return total


def calibrate_sigma(cfg: SimConfig, rng=None, draws: int = 100_000) -> float:
    """Noise level hitting the configured signal-to-noise ratio.

    sigma^2 = Var(signal)/snr with the signal variance estimated from
    ``draws`` Monte Carlo rows of the active covariate block.
    """
    if rng is None:
        rng = np.random.default_rng([cfg.seed, 0])
    k = len(cfg.active)
    W = sample_truncnorm01((draws, k), rng)
    u = sample_truncnorm01(draws, rng)
    Xa = (W + cfg.t_dep * u[:, None]) / (1.0 + cfg.t_dep)
    comps = model_components(cfg.model)
    signal = np.zeros(draws)
    for i in range(k):
        signal += comps[i](Xa[:, i])
    var = float(np.var(signal, ddof=1))
    if not np.isfinite(cfg.snr):
        return 0.0
    return float(np.sqrt(var / cfg.snr))


def gen_response(X: np.ndarray, model: str, sigma: float, rng, active=(0, 1, 2, 3)) -> np.ndarray:
    """Signal plus N(0, sigma^2) noise."""
    y = _signal(X, model, active)
    if sigma > 0:
        y = y + sigma * rng.standard_normal(X.shape[0])
    return y


def tp_fp(support, active) -> tuple:
    """True and false positive counts of a selected covariate set."""
    support = set(int(j) for j in support)
    active = set(int(j) for j in active)
    tp = len(support & active)
    return tp, len(support) - tp


def component_mse(fit: FitResult, j: int, X: np.ndarray, model: str, active=(0, 1, 2, 3)) -> float:
    """Mean squared error of fitted component j over the observed points.

    Both the fitted and the true component are centered over the
    observed covariate values first; the intercept absorbs constants, so
    only the centered shapes are comparable.  For j outside the active
    set the truth is identically zero.
    """
    x = X[:, j]
    active = tuple(active)
    if j in active:
        truth = true_component(model, active.index(j), x)
    else:
        truth = np.zeros_like(x)
    truth = truth - truth.mean()
    est = component_values(fit, j, x)
    est = est - est.mean()
    return float(np.mean((est - truth) ** 2))


def monotonicity_audit(fit: FitResult) -> dict:
    """Check every selected component curve of a monotone-basis fit.

    Sign-coherent blocks must produce monotone curves (this is the
    method's construction; a violation would be a bug).  Blocks that
    lost sign coherence cannot promise monotonicity and are flagged
    separately rather than counted as violations.
    """
    grid = np.linspace(0.0, 1.0, AUDIT_GRID_SIZE)
    incoherent, violations = [], []
    for j in fit.support:
        if not fit.sign_coherent[j]:
            incoherent.append(int(j))
            continue
        curve = component_curve(fit, j, grid)
        d = np.diff(curve)
        tol = 1e-9 * max(1.0, float(np.abs(curve).max()))
        if not (np.all(d >= -tol) or np.all(d <= tol)):
            violations.append(int(j))
    return {"incoherent": incoherent, "violations": violations}


def _fit_method(method: str, X, y, cfg: SimConfig, fold_assignment, cache: dict) -> FitResult:
    shared = dict(
        folds=cfg.folds,
        grid_size=cfg.grid_size,
        grid_ratio=cfg.grid_ratio,
        fold_assignment=fold_assignment,
    )
    spline = dict(knots=cfg.knots, order=cfg.order)
    if method == "ms":
        return fit_ms_lasso(X, y, **spline, **shared)
    if method == "ams":
        if "ms" not in cache:
            cache["ms"] = fit_ms_lasso(X, y, **spline, **shared)
        return fit_adaptive_ms_lasso(X, y, initial_fit=cache["ms"], **spline, **shared)
    if method == "lasso":
        return fit_lasso(X, y, **shared)
    if method == "alasso":
        if "lasso" not in cache:
            cache["lasso"] = fit_lasso(X, y, **shared)
        return fit_adaptive_lasso(X, y, initial_fit=cache["lasso"], **shared)
    if method == "bs":
        return fit_bs_lasso(X, y, knots=cfg.knots, degree=cfg.order, **shared)
    raise ValueError(f"unknown method {method!r}")


def _method_order(methods) -> list:
    # run initial-stage methods before their adaptive stages so the
    # stage-one fit is computed once per replication
    return [m for m in METHODS if m in methods]


def _run_replication(cfg: SimConfig, sigma: float, r: int) -> dict:
    """Generate one data set and fit every configured method on it."""
    data_rng = np.random.default_rng([cfg.seed, 1, r])
    X = gen_covariates(cfg, data_rng)
    y = gen_response(X, cfg.model, sigma, data_rng, active=cfg.active)
    fold_assignment = kfold_split(cfg.n, cfg.folds, seed=[cfg.seed, 2, r])
    cache: dict = {}
    out = {"replication": r, "methods": {}}
    for method in _method_order(cfg.methods):
        try:
            fit = _fit_method(method, X, y, cfg, fold_assignment, cache)
            cache.setdefault(method, fit)
        except Exception as err:  # noqa: BLE001 - a bad replication must not kill the run
            out["methods"][method] = {"error": f"{type(err).__name__}: {err}"}
            continue
        support = [int(j) for j in fit.support]
        tp, fp = tp_fp(support, cfg.active)
        rec = {
            "support": support,
            "tp": tp,
            "fp": fp,
            "lam": fit.lam,
            "lam_initial": fit.lam_initial,
            "converged": bool(fit.converged),
            "mse": [component_mse(fit, j, X, cfg.model, cfg.active) for j in cfg.active],
            "intercept": float(fit.intercept),
            "coef": {
                str(j): [float(b) for b in fit.beta[fit.design.groups[j]]] for j in support
            },
        }
        if method in ("ms", "ams"):
            rec.update(monotonicity_audit(fit))
        out["methods"][method] = rec
    return out


def _replication_star(args):
    return _run_replication(*args)


def aggregate_records(records, cfg: SimConfig) -> dict:
    """Per-method means and standard deviations over replications.

    Failed replications are skipped per method; ``replications_ok``
    records how many contributed to each cell.
    """

    def mean_sd(values):
        v = np.asarray(values, dtype=float)
        sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
        return {"mean": float(np.mean(v)), "sd": sd}

    def mean_sd_cols(rows):
        a = np.asarray(rows, dtype=float)
        sd = np.std(a, axis=0, ddof=1) if a.shape[0] > 1 else np.zeros(a.shape[1])
        return {"mean": [float(m) for m in a.mean(axis=0)], "sd": [float(s) for s in sd]}

    out = {}
    for method in _method_order(cfg.methods):
        recs = [
            rep["methods"][method]
            for rep in records
            if method in rep["methods"] and "error" not in rep["methods"][method]
        ]
        if not recs:
            out[method] = {"replications_ok": 0}
            continue
        selected = [[float(j in set(rec["support"])) for j in cfg.active] for rec in recs]
        out[method] = {
            "replications_ok": len(recs),
            "selection": mean_sd_cols(selected),
            "tp": mean_sd([rec["tp"] for rec in recs]),
            "fp": mean_sd([rec["fp"] for rec in recs]),
            "mse": mean_sd_cols([rec["mse"] for rec in recs]),
        }
    return out


@dataclass
class SimReport:
    """Aggregated results of one scenario plus the raw per-replication records."""

    config: SimConfig
    sigma: float
    aggregates: dict
    records: list = field(repr=False)
    errors: list
    runtime: float

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "sigma": self.sigma,
            "aggregates": self.aggregates,
            "records": self.records,
            "errors": self.errors,
            "runtime": self.runtime,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _cell(stats, i=None, fmt="%.2f"):
    if i is None:
        m, s = stats["mean"], stats["sd"]
    else:
        m, s = stats["mean"][i], stats["sd"][i]
    return f"{fmt % m} ({fmt % s})"


def format_table(report: SimReport) -> str:
    """Aligned-text summary: a selection block and an estimation block."""
    cfg = report.config
    k = len(cfg.active)
    comp_names = [f"comp{i + 1}" for i in range(k)]
    lines = [
        f"model={cfg.model} n={cfg.n} P={cfg.P} t={cfg.t_dep:g} snr={cfg.snr:g} "
        f"R={cfg.replications} sigma={report.sigma:.4f} runtime={report.runtime:.1f}s",
        "",
    ]

    def block(title, headers, rows):
        widths = [
            max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(headers)
        ]
        lines.append(title)
        lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
        for row in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
        lines.append("")

    sel_rows, mse_rows = [], []
    for method in _method_order(cfg.methods):
        agg = report.aggregates.get(method, {})
        n_ok = agg.get("replications_ok", 0)
        if n_ok == 0:
            sel_rows.append([method] + ["-"] * (k + 2) + ["0"])
            mse_rows.append([method] + ["-"] * k)
            continue
        flag = str(n_ok) if n_ok == cfg.replications else f"{n_ok}(!)"
        sel_rows.append(
            [method]
            + [_cell(agg["selection"], i) for i in range(k)]
            + [_cell(agg["tp"]), _cell(agg["fp"]), flag]
        )
        mse_rows.append([method] + [_cell(agg["mse"], i, fmt="%.3f") for i in range(k)])
    block("Selection", ["method"] + comp_names + ["TP", "FP", "reps"], sel_rows)
    block("Estimation (component MSE)", ["method"] + comp_names, mse_rows)
    if report.errors:
        lines.append(f"errors ({len(report.errors)}):")
        lines.extend(f"  {e}" for e in report.errors)
        lines.append("")
    return "\n".join(lines)


def run_experiment(cfg: SimConfig) -> SimReport:
    """Run all replications of a scenario and aggregate the results.

    Replications are independent given the calibrated noise level, so
    ``cfg.jobs > 1`` fans them out over processes; results are identical
    either way.
    """
    start = time.perf_counter()
    sigma = calibrate_sigma(cfg)
    tasks = [(cfg, sigma, r) for r in range(cfg.replications)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_replication_star, tasks))
    else:
        records = [_run_replication(*t) for t in tasks]
    errors = [
        f"replication {rep['replication']}, {m}: {rec['error']}"
        for rep in records
        for m, rec in rep["methods"].items()
        if "error" in rec
    ]
    aggregates = aggregate_records(records, cfg)
    runtime = time.perf_counter() - start
    return SimReport(
        config=cfg,
        sigma=sigma,
        aggregates=aggregates,
        records=records,
        errors=errors,
        runtime=runtime,
    )
