import numpy as np
import numpy.testing as npt
import pytest

from monospline.design import build_design, center_response, expand_new
from monospline.splines import BasisSpec, make_knots

ISPLINE8 = BasisSpec(kind="ispline", knot_vector=make_knots(6, 2))
IDENTITY = BasisSpec(kind="identity")


class TestBuildDesign:
    def test_identity_basis_centers_columns(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(20, 3))
        d = build_design(X, IDENTITY)
        npt.assert_allclose(d.Z, X - X.mean(axis=0), atol=1e-14)

    def test_shape_and_zero_means(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(size=(50, 1))
        d = build_design(X, ISPLINE8)
        assert d.Z.shape == (50, 8)
        scale = np.abs(d.Z).max(axis=0)
        assert np.all(np.abs(d.Z.mean(axis=0)) <= 1e-12 * np.maximum(scale, 1.0))

    def test_groups_partition_columns(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(size=(30, 4))
        d = build_design(X, ISPLINE8)
        assert len(d.groups) == 4
        cols = []
        for g in d.groups:
            cols.extend(range(*g.indices(d.Z.shape[1])))
        assert cols == list(range(32))

    def test_round_trip_on_training_data(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(40, 2))
        d = build_design(X, ISPLINE8)
        npt.assert_allclose(expand_new(X, d), d.Z, atol=1e-14)

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        X = rng.uniform(size=(25, 2))
        d1 = build_design(X, ISPLINE8)
        d2 = build_design(X, ISPLINE8)
        npt.assert_array_equal(d1.Z, d2.Z)

    def test_rejects_constant_column(self):
        X = np.column_stack([np.ones(10), np.arange(10.0)])
        with pytest.raises(ValueError, match="column 0"):
            build_design(X, IDENTITY)

    def test_rejects_non_finite(self):
        X = np.arange(10.0)[:, None]
        X[3] = np.nan
        with pytest.raises(ValueError):
            build_design(X, IDENTITY)

    def test_rejects_tiny_sample(self):
        with pytest.raises(ValueError, match="at least 2"):
            build_design(np.array([[0.5]]), IDENTITY)


class TestExpandNew:
    def test_single_row_shape(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(size=(30, 3))
        d = build_design(X, ISPLINE8)
        out = expand_new(X[0], d)
        assert out.shape == (1, 24)
        npt.assert_allclose(out[0], d.Z[0], atol=1e-14)

    def test_out_of_range_values_clamp(self):
        rng = np.random.default_rng(6)
        X = rng.uniform(size=(30, 1))
        d = build_design(X, ISPLINE8)
        beyond = expand_new(np.array([[X.max() + 5.0]]), d)
        at_max = expand_new(np.array([[X.max()]]), d)
        npt.assert_allclose(beyond, at_max, atol=1e-14)

    def test_column_mismatch(self):
        rng = np.random.default_rng(7)
        d = build_design(rng.uniform(size=(30, 2)), IDENTITY)
        with pytest.raises(ValueError, match="mismatch"):
            expand_new(np.zeros((3, 5)), d)


class TestCenterResponse:
    def test_example(self):
        yc, ym = center_response([1.0, 2.0, 3.0])
        npt.assert_allclose(yc, [-1.0, 0.0, 1.0])
        assert ym == pytest.approx(2.0)

    def test_already_centered(self):
        y = np.array([-1.5, 0.5, 1.0])
        yc, ym = center_response(y)
        npt.assert_allclose(yc, y, atol=1e-15)
        assert ym == pytest.approx(0.0)

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            center_response([1.0, np.nan, 2.0])


class TestMonotonicityUnderCentering:
    def test_nonnegative_coefficients_give_nondecreasing_component(self):
        # Centering shifts each basis column by a constant, so it cannot
        # break the monotonicity that nonnegative I-spline coefficients
        # guarantee.
        rng = np.random.default_rng(8)
        X = rng.uniform(size=(60, 1))
        d = build_design(X, ISPLINE8)
        grid = np.linspace(X.min(), X.max(), 501)[:, None]
        Zg = expand_new(grid, d)
        for _ in range(20):
            beta = rng.uniform(0.0, 2.0, size=8)
            fitted = Zg @ beta
            assert np.all(np.diff(fitted) >= -1e-12)
