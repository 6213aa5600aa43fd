"""Command line interface.

Subcommands:

* ``fit``      : fit one method to a CSV data set; writes a JSON fit file
                 plus a TSV of fitted component curves.
* ``predict``  : apply a stored fit file to new covariate rows.
* ``cv``       : write the cross-validation curve and the chosen strength.
* ``simulate`` : run a benchmark scenario from a JSON config.
* ``basis``    : dump the basis matrix for a covariate column (debugging).

CSV inputs are UTF-8 with a header row and '.' decimals.  Exit codes:
0 on success, 2 when a requested fit did not converge (outputs are still
written), 1 for malformed input or usage errors, with a line/column
diagnostic on stderr where applicable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .design import build_design
from .estimators import (
    FitResult,
    component_curve,
    fit_adaptive_lasso,
    fit_adaptive_ms_lasso,
    fit_bs_lasso,
    fit_lasso,
    fit_ms_lasso,
    predict,
)
from .simulation import SimConfig, format_table, run_experiment
from .solver import PenaltySpec, lambda_max
from .splines import BasisSpec, apply_rescale, make_knots, rescale_to_unit

CURVE_POINTS = 201

_FITTERS = {
    "ms": fit_ms_lasso,
    "ams": fit_adaptive_ms_lasso,
    "lasso": fit_lasso,
    "alasso": fit_adaptive_lasso,
    "bs": fit_bs_lasso,
}


class CliError(Exception):
    """Input problem with a user-facing diagnostic; exits 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default, which would collide
    # with the non-convergence code; usage problems are input problems
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_table(path):
    """Numeric CSV with a header row -> (column names, float matrix)."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as err:
        raise CliError(f"cannot read {path}: {err.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CliError(f"{path}: empty file") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise CliError(
                    f"{path}, line {lineno}: expected {len(header)} fields, "
                    f"found {len(row)}"
                )
            values = []
            for name, cell in zip(header, row):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CliError(
                        f"{path}, line {lineno}, column {name!r}: "
                        f"non-numeric value {cell!r}"
                    ) from None
            rows.append(values)
    if not rows:
        raise CliError(f"{path}: no data rows")
    return header, np.array(rows)


def _split_response(header, data, response):
    if response is None:
        idx = len(header) - 1
    else:
        try:
            idx = header.index(response)
        except ValueError:
            raise CliError(
                f"response column {response!r} not in header {header}"
            ) from None
    if len(header) < 2:
        raise CliError("need at least one covariate column besides the response")
    y = data[:, idx]
    X = np.delete(data, idx, axis=1)
    names = [h for i, h in enumerate(header) if i != idx]
    return X, y, names, header[idx]


def _resolve_seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("MONOSPLINE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"MONOSPLINE_SEED must be an integer, got {env!r}") from None
    return None


def _run_fitter(args, X, y, seed, lam="use-args"):
    kwargs = dict(
        lam=args.lam if lam == "use-args" else lam,
        folds=args.folds,
        seed=0 if seed is None else seed,
        grid_size=args.grid_size,
        grid_ratio=args.grid_ratio,
    )
    if args.method in ("ms", "ams"):
        kwargs.update(knots=args.knots, order=args.order)
    elif args.method == "bs":
        kwargs.update(knots=args.knots, degree=args.order)
    return _FITTERS[args.method](X, y, **kwargs)


def _fit_lambda_max(args, X, y):
    if args.method in ("ms", "ams"):
        basis = BasisSpec(kind="ispline", knot_vector=make_knots(args.knots, args.order))
        kind = "coop"
    elif args.method == "bs":
        basis = BasisSpec(kind="bspline", knot_vector=make_knots(args.knots, args.order + 1))
        kind = "group"
    else:
        basis = BasisSpec(kind="identity")
        kind = "l1"
    design = build_design(X, basis)
    pen = PenaltySpec(kind, design.groups, np.ones(X.shape[1]))
    return lambda_max(design.Z, y - y.mean(), pen)


def _write_curves(path, fit: FitResult, names):
    grid = np.linspace(0.0, 1.0, CURVE_POINTS)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# intercept\t{float(fit.intercept)!r}\n")
        fh.write("covariate\tname\tposition\tx\tvalue\n")
        for j in sorted(int(v) for v in fit.support):
            lo, hi = fit.design.rescale[j]
            curve = component_curve(fit, j, grid)
            xs = lo + grid * (hi - lo)
            for u, xv, val in zip(grid, xs, curve):
                fh.write(f"{j}\t{names[j]}\t{float(u)!r}\t"
                         f"{float(xv)!r}\t{float(val)!r}\n")


def cmd_fit(args) -> int:
    header, data = _read_table(args.input)
    X, y, names, response = _split_response(header, data, args.response)
    if args.lambda_max_only:
        print(f"{float(_fit_lambda_max(args, X, y))!r}")
        return 0
    seed = _resolve_seed(args)
    fit = _run_fitter(args, X, y, seed)
    payload = fit.to_dict()
    payload["columns"] = names
    payload["response"] = response
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    root, _ = os.path.splitext(args.output)
    curve_path = args.curves if args.curves else root + ".curves.tsv"
    _write_curves(curve_path, fit, names)
    if not fit.converged:
        print(
            f"warning: solver did not converge (kkt residual {fit.kkt:g}); "
            "outputs written",
            file=sys.stderr,
        )
        return 2
    return 0


def cmd_predict(args) -> int:
    try:
        with open(args.fit, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as err:
        raise CliError(f"cannot read {args.fit}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise CliError(f"{args.fit}: not valid JSON ({err})") from None
    fit = FitResult.from_dict(payload)
    header, data = _read_table(args.input)
    stored = payload.get("columns")
    response = payload.get("response")
    if response in header:
        keep = [i for i, h in enumerate(header) if h != response]
        header = [header[i] for i in keep]
        data = data[:, keep]
    if stored is not None and header != stored and sorted(header) == sorted(stored):
        order = [header.index(c) for c in stored]
        header = stored
        data = data[:, order]
    if stored is not None and header != stored:
        raise CliError(
            f"covariate columns {header} do not match the fit's {stored}"
        )
    if data.shape[1] != len(fit.design.groups):
        raise CliError(
            f"{args.input}: {data.shape[1]} covariate columns, "
            f"fit expects {len(fit.design.groups)}"
        )
    yhat = predict(fit, data)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("prediction\n")
        for v in yhat:
            fh.write(f"{float(v)!r}\n")
    return 0


def cmd_cv(args) -> int:
    header, data = _read_table(args.input)
    X, y, _, _ = _split_response(header, data, args.response)
    seed = _resolve_seed(args)
    fit = _run_fitter(args, X, y, seed, lam=None)
    cvr = fit.cv
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("lambda\tcv\n")
        if cvr is not None:
            for lam, val in zip(cvr.lambdas, cvr.cv_values):
                fh.write(f"{float(lam)!r}\t{float(val)!r}\n")
    if cvr is None:
        print(f"chosen_lambda\t{fit.lam}")
        print(f"note\t{fit.note}", file=sys.stderr)
    else:
        print(f"chosen_lambda\t{float(fit.lam)!r}")
    return 0 if fit.converged else 2


def cmd_simulate(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as err:
        raise CliError(f"cannot read {args.config}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise CliError(f"{args.config}: not valid JSON ({err})") from None
    try:
        if args.jobs is not None:
            raw["jobs"] = args.jobs
        seed = _resolve_seed(args)
        if seed is not None:
            raw["seed"] = seed
        cfg = SimConfig.from_dict(raw)
    except (TypeError, ValueError) as err:
        raise CliError(f"{args.config}: {err}") from None
    report = run_experiment(cfg)
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    print(format_table(report))
    bad_fits = [
        f"replication {rep['replication']}, {m}: did not converge"
        for rep in report.records
        for m, rec in rep["methods"].items()
        if "error" not in rec and not rec["converged"]
    ]
    if report.errors or bad_fits:
        for line in report.errors + bad_fits:
            print(line, file=sys.stderr)
        return 2
    return 0


def cmd_basis(args) -> int:
    header, data = _read_table(args.input)
    if args.column is None:
        idx = 0
    else:
        try:
            idx = header.index(args.column)
        except ValueError:
            raise CliError(
                f"column {args.column!r} not in header {header}"
            ) from None
    x = data[:, idx]
    if args.basis == "identity":
        basis = BasisSpec(kind="identity")
    else:
        order = args.order + 1 if args.basis == "bspline" else args.order
        basis = BasisSpec(kind=args.basis, knot_vector=make_knots(args.knots, order))
    if basis.kind == "identity":
        values = basis.evaluate(x)
    else:
        _, (lo, hi) = rescale_to_unit(x)
        values = basis.evaluate(apply_rescale(x, lo, hi))
    if args.centered:
        values = values - values.mean(axis=0)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("\t".join(f"B{k + 1}" for k in range(values.shape[1])) + "\n")
        for row in values:
            fh.write("\t".join(repr(float(v)) for v in row) + "\n")
    return 0


def _add_common(sub, with_method=True):
    sub.add_argument("--input", required=True, help="CSV data file with header row")
    if with_method:
        sub.add_argument(
            "--method",
            choices=sorted(_FITTERS),
            default="ms",
            help="estimator (default ms)",
        )
        sub.add_argument("--response", default=None,
                         help="response column name (default: last column)")
        sub.add_argument("--lambda", dest="lam", type=float, default=None,
                         help="penalty strength; tuned by CV when omitted")
        sub.add_argument("--folds", type=int, default=10)
        sub.add_argument("--grid-size", type=int, default=100)
        sub.add_argument("--grid-ratio", type=float, default=1e-3)
    sub.add_argument("--knots", type=int, default=6,
                     help="interior knot count (default 6)")
    sub.add_argument("--order", type=int, default=2,
                     help="spline order; polynomial degree for method bs (default 2)")
    sub.add_argument("--seed", type=int, default=None,
                     help="RNG seed (falls back to MONOSPLINE_SEED, then 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monospline",
                     description="Sparse monotone additive regression.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_fit = subs.add_parser("fit", parents=[], help="fit a model to CSV data")
    _add_common(p_fit)
    p_fit.add_argument("--output", default="fit.json", help="fit file (JSON)")
    p_fit.add_argument("--curves", default=None,
                       help="curve TSV path (default: fit file stem + .curves.tsv)")
    p_fit.add_argument("--lambda-max-only", action="store_true",
                       help="print the smallest all-zero penalty strength and exit")
    p_fit.set_defaults(func=cmd_fit)

    p_pred = subs.add_parser("predict", help="predict with a stored fit file")
    p_pred.add_argument("--input", required=True, help="CSV of covariate rows")
    p_pred.add_argument("--fit", required=True, help="fit file from `fit`")
    p_pred.add_argument("--output", default="predictions.csv")
    p_pred.set_defaults(func=cmd_predict)

    p_cv = subs.add_parser("cv", help="write the CV curve and chosen strength")
    _add_common(p_cv)
    p_cv.add_argument("--output", default="cv.tsv")
    p_cv.set_defaults(func=cmd_cv)

    p_sim = subs.add_parser("simulate", help="run a benchmark scenario")
    p_sim.add_argument("--config", required=True, help="scenario JSON file")
    p_sim.add_argument("--output", default="simreport.json")
    p_sim.add_argument("--jobs", type=int, default=None,
                       help="parallel replications (results are identical)")
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_basis = subs.add_parser("basis", help="dump a basis matrix as TSV")
    p_basis.add_argument("--input", required=True, help="CSV data file")
    p_basis.add_argument("--column", default=None,
                         help="covariate column name (default: first)")
    p_basis.add_argument("--basis", choices=("ispline", "bspline", "identity"),
                         default="ispline")
    p_basis.add_argument("--knots", type=int, default=6)
    p_basis.add_argument("--order", type=int, default=2)
    p_basis.add_argument("--centered", action="store_true",
                         help="subtract column means")
    p_basis.add_argument("--output", default="basis.tsv")
    p_basis.set_defaults(func=cmd_basis)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
