import numpy as np
import numpy.testing as npt
import pytest

from monospline.design import build_design, center_response, expand_new
from monospline.model_selection import CVResult, cv_curve, kfold_split, select_lambda
from monospline.solver import PenaltySpec, lambda_max, lambda_path
from monospline.splines import BasisSpec, make_knots

IDENTITY = BasisSpec(kind="identity")
ISPLINE = BasisSpec(kind="ispline", knot_vector=make_knots(6, 2))


class TestKfoldSplit:
    def test_even_split(self):
        folds = kfold_split(50, 10, seed=0)
        npt.assert_array_equal(np.bincount(folds), np.full(10, 5))

    def test_balanced_remainder(self):
        folds = kfold_split(52, 10, seed=1)
        sizes = np.sort(np.bincount(folds))
        npt.assert_array_equal(sizes, [5] * 8 + [6] * 2)

    def test_same_seed_same_folds(self):
        npt.assert_array_equal(kfold_split(37, 5, seed=7), kfold_split(37, 5, seed=7))

    def test_different_seed_differs(self):
        assert np.any(kfold_split(37, 5, seed=7) != kfold_split(37, 5, seed=8))

    def test_too_many_folds(self):
        with pytest.raises(ValueError, match="more folds"):
            kfold_split(5, 10)


class TestSelectLambda:
    def test_unique_argmin(self):
        lams = np.array([4.0, 2.0, 1.0])
        assert select_lambda(lams, [3.0, 1.0, 2.0]) == 2.0

    def test_flat_curve_takes_largest(self):
        lams = np.array([4.0, 2.0, 1.0])
        assert select_lambda(lams, [1.0, 1.0, 1.0]) == 4.0

    def test_decreasing_curve_takes_smallest(self):
        lams = np.array([4.0, 2.0, 1.0])
        assert select_lambda(lams, [3.0, 2.0, 1.0]) == 1.0

    def test_accepts_cv_result(self):
        cvr = CVResult(np.array([2.0, 1.0]), np.array([0.5, 0.2]), 1.0, 0)
        assert select_lambda(cvr) == 1.0


class TestCVResultValidation:
    def test_rejects_increasing_grid(self):
        with pytest.raises(ValueError, match="decreasing"):
            CVResult(np.array([1.0, 2.0]), np.array([0.1, 0.2]), 1.0, 0)

    def test_rejects_non_minimal_choice(self):
        with pytest.raises(ValueError, match="minimum"):
            CVResult(np.array([2.0, 1.0]), np.array([0.1, 0.2]), 1.0, 0)


def _linear_data(seed, n=40, P=3, noise=0.0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, P))
    y = 2.0 * X[:, 0] - 1.0 * X[:, 1] + noise * rng.normal(size=n)
    return X, y


class TestCVCurve:
    def test_perfect_predictor_reaches_zero(self):
        X, y = _linear_data(0)
        grid = np.array([1e-8, 0.0])
        cvr = cv_curve(X, y, IDENTITY, "l1", np.ones(3), grid, K=5, seed=0)
        assert cvr.cv_values.min() < 1e-12
        assert cvr.lam == 0.0

    def test_null_model_matches_closed_form(self):
        X, y = _linear_data(1, noise=0.5)
        n = y.size
        folds = kfold_split(n, 5, seed=3)
        design_pen = PenaltySpec("l1", tuple(slice(j, j + 1) for j in range(3)),
                                 np.ones(3))
        lmax = lambda_max(build_design(X, IDENTITY).Z, y - y.mean(), design_pen)
        grid = np.array([1e6 * max(lmax, 1.0)])
        cvr = cv_curve(X, y, IDENTITY, "l1", np.ones(3), grid, folds=folds)
        expected = 0.0
        for k in np.unique(folds):
            mean_k = y[folds != k].mean()
            expected += np.sum((y[folds == k] - mean_k) ** 2)
        assert cvr.cv_values[0] == pytest.approx(expected / n, rel=1e-12)

    def test_permutation_invariance_with_matching_folds(self):
        X, y = _linear_data(2, noise=0.3)
        folds = kfold_split(y.size, 4, seed=5)
        grid = np.array([0.5, 0.1, 0.02])
        a = cv_curve(X, y, IDENTITY, "l1", np.ones(3), grid, folds=folds)
        rng = np.random.default_rng(9)
        perm = rng.permutation(y.size)
        b = cv_curve(X[perm], y[perm], IDENTITY, "l1", np.ones(3), grid,
                     folds=folds[perm])
        npt.assert_allclose(a.cv_values, b.cv_values, rtol=1e-12)

    def test_deterministic(self):
        X, y = _linear_data(3, noise=0.3)
        grid = np.array([0.4, 0.1])
        a = cv_curve(X, y, ISPLINE, "coop", np.ones(3), grid, K=4, seed=2)
        b = cv_curve(X, y, ISPLINE, "coop", np.ones(3), grid, K=4, seed=2)
        npt.assert_array_equal(a.cv_values, b.cv_values)

    def test_tiny_fold_rejected(self):
        X, y = _linear_data(4, n=11)
        with pytest.raises(ValueError, match="at least 2"):
            cv_curve(X, y, IDENTITY, "l1", np.ones(3), np.array([0.1]), K=10)

    def test_differs_from_leaky_implementation(self):
        # A leaky CV builds the design (rescale + centering) on the full
        # data; with min-max rescaling the fold-trained transform differs,
        # so the two curves must not coincide.
        X, y = _linear_data(5, n=30, noise=0.4)
        folds = kfold_split(y.size, 5, seed=1)
        grid = np.array([0.3, 0.05])
        honest = cv_curve(X, y, ISPLINE, "coop", np.ones(3), grid, folds=folds)

        design = build_design(X, ISPLINE)
        leaky_sse = np.zeros(grid.size)
        for k in np.unique(folds):
            test = folds == k
            train = ~test
            y_tr, y_mean = center_response(y[train])
            pen = PenaltySpec("coop", design.groups, np.ones(3))
            path = lambda_path(design.Z[train], y_tr, pen, lambdas=grid)
            for i, res in enumerate(path):
                pred = y_mean + design.Z[test] @ res.beta
                leaky_sse[i] += np.sum((y[test] - pred) ** 2)
        assert np.all(np.abs(honest.cv_values - leaky_sse / y.size) > 1e-8)
