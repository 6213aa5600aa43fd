"""Tests for the synthetic benchmark harness."""

import dataclasses
import json
import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy import integrate
from scipy.stats import kstest, norm

from monospline.estimators import fit_lasso, fit_ms_lasso
from monospline.simulation import (
    SimConfig,
    aggregate_records,
    calibrate_sigma,
    component_mse,
    format_table,
    gen_covariates,
    gen_response,
    model_components,
    monotonicity_audit,
    run_experiment,
    sample_truncnorm01,
    tp_fp,
    true_component,
)
from monospline.solver import SolverConfig


def _truncnorm_cdf(x):
    lo, hi = norm.cdf(0.0), norm.cdf(1.0)
    return np.clip((norm.cdf(x) - lo) / (hi - lo), 0.0, 1.0)


class TestTruncatedNormal:
    def test_all_draws_inside_unit_interval(self):
        draws = sample_truncnorm01(100_000, np.random.default_rng(1))
        assert draws.min() >= 0.0 and draws.max() <= 1.0

    def test_empirical_cdf_matches_closed_form(self):
        draws = sample_truncnorm01(100_000, np.random.default_rng(2))
        stat = kstest(draws, _truncnorm_cdf).statistic
        assert stat < 0.02

    def test_fixed_seed_reproduces_stream(self):
        a = sample_truncnorm01((3, 5), np.random.default_rng(44))
        b = sample_truncnorm01((3, 5), np.random.default_rng(44))
        npt.assert_array_equal(a, b)


class TestCovariateGenerator:
    def test_values_inside_unit_interval(self):
        cfg = SimConfig(n=200, P=30, t_dep=1.5, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(3))
        assert X.shape == (200, 30)
        assert X.min() >= 0.0 and X.max() <= 1.0

    def test_no_dependence_returns_base_draws(self):
        cfg = SimConfig(n=40, P=9, t_dep=0.0, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(5))
        W = sample_truncnorm01((40, 9), np.random.default_rng(5))
        npt.assert_array_equal(X, W)

    def test_unit_dependence_is_the_half_half_mix(self):
        cfg = SimConfig(n=25, P=7, t_dep=1.0, active=(0, 1, 2, 3), replications=1)
        X = gen_covariates(cfg, np.random.default_rng(6))
        rng = np.random.default_rng(6)
        W = sample_truncnorm01((25, 7), rng)
        u = sample_truncnorm01(25, rng)
        v = sample_truncnorm01(25, rng)
        npt.assert_array_equal(X[:, :4], (W[:, :4] + u[:, None]) / 2.0)
        npt.assert_array_equal(X[:, 4:], (W[:, 4:] + v[:, None]) / 2.0)

    def test_unit_dependence_pairwise_correlation_half(self):
        # shared latent of equal variance: corr = Var(u)/(Var(w)+Var(u)) = 1/2
        cfg = SimConfig(n=10_000, P=6, t_dep=1.0, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(7))
        corr = np.corrcoef(X[:, :4].T)
        off_diag = corr[np.triu_indices(4, k=1)]
        npt.assert_allclose(off_diag, 0.5, atol=0.05)


class TestTrueComponents:
    def test_pinned_values(self):
        assert true_component("B", 3, 0.5) == pytest.approx(1.0)
        assert true_component("A", 1, 0.9) == pytest.approx(0.0, abs=1e-15)
        assert true_component("A", 3, 0.5) == pytest.approx(1.0)
        assert true_component("A", 0, 0.0) == pytest.approx(-1.0)

    def test_model_b_swaps_only_the_fourth_component(self):
        x = np.linspace(0.0, 1.0, 101)
        a, b = model_components("A"), model_components("B")
        for k in range(3):
            npt.assert_array_equal(a[k](x), b[k](x))
        assert np.max(np.abs(a[3](x) - b[3](x))) > 0.1
        npt.assert_allclose(b[3](x), 2.0 * x)

    def test_linear_model_slopes(self):
        x = np.linspace(0.0, 1.0, 11)
        comps = model_components("linear")
        for k, slope in enumerate((-2.0, -2.0, 2.0, 2.0)):
            npt.assert_allclose(comps[k](x), slope * x)

    def test_unknown_model_and_index_raise(self):
        with pytest.raises(ValueError):
            model_components("C")
        with pytest.raises(IndexError):
            true_component("A", 4, 0.5)


class TestNoiseCalibration:
    def test_same_seed_same_sigma(self):
        cfg = SimConfig(replications=1)
        assert calibrate_sigma(cfg) == calibrate_sigma(cfg)

    def test_doubling_snr_halves_variance(self):
        s4 = calibrate_sigma(SimConfig(snr=4.0, replications=1))
        s8 = calibrate_sigma(SimConfig(snr=8.0, replications=1))
        npt.assert_allclose(s8**2, s4**2 / 2.0, rtol=1e-12)

    def test_infinite_snr_means_no_noise(self):
        assert calibrate_sigma(SimConfig(snr=math.inf, replications=1)) == 0.0


class TestResponseGenerator:
    def test_zero_sigma_gives_exact_signal(self):
        cfg = SimConfig(n=30, P=8, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(8))
        y = gen_response(X, "A", 0.0, np.random.default_rng(9), active=cfg.active)
        comps = model_components("A")
        expected = sum(comps[k](X[:, k]) for k in range(4))
        npt.assert_array_equal(y, expected)

    def test_linear_model_row_arithmetic(self):
        X = np.array([[0.5, 0.25, 0.75, 1.0, 0.3]])
        y = gen_response(X, "linear", 0.0, np.random.default_rng(0), active=(0, 1, 2, 3))
        expected = -2 * 0.5 - 2 * 0.25 + 2 * 0.75 + 2 * 1.0
        npt.assert_allclose(y, [expected])

    def test_noise_scale(self):
        X = np.zeros((20_000, 1))
        y = gen_response(X, "linear", 3.0, np.random.default_rng(10), active=(0,))
        assert abs(np.std(y) - 3.0) < 0.1


class TestMetrics:
    def test_tp_fp_examples(self):
        active = (0, 1, 2, 3)
        assert tp_fp(active, active) == (4, 0)
        assert tp_fp((), active) == (0, 0)
        assert tp_fp((0, 1, 6, 8), active) == (2, 2)

    def test_unselected_component_mse_is_centered_truth_variance(self):
        cfg = SimConfig(n=50, P=6, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(11))
        y = gen_response(X, "A", 0.4, np.random.default_rng(12), active=cfg.active)
        fit = fit_ms_lasso(X, y, lam=1e9)
        assert fit.support.size == 0
        for k, j in enumerate(cfg.active):
            truth = true_component("A", k, X[:, j])
            expected = np.mean((truth - truth.mean()) ** 2)
            npt.assert_allclose(component_mse(fit, j, X, "A", cfg.active), expected, rtol=1e-12)

    def test_perfect_fit_up_to_constant_has_zero_mse(self):
        rng = np.random.default_rng(13)
        X = rng.uniform(size=(40, 1))
        y = -2.0 * X[:, 0] + 5.0
        tight = SolverConfig(rel_obj_tol=1e-15, rel_step_tol=1e-10)
        fit = fit_lasso(X, y, lam=0.0, cfg=tight)
        assert component_mse(fit, 0, X, "linear", active=(0,)) < 1e-10

    def test_never_selected_floor_matches_quadrature_oracle(self):
        # the MSE of a never-selected component settles at the centered
        # variance of its truth under the covariate law; check the
        # generator against direct numerical integration of that law
        z = norm.cdf(1.0) - norm.cdf(0.0)

        def g(x):
            return -np.exp(x**2)

        m1 = integrate.quad(lambda x: g(x) * norm.pdf(x) / z, 0, 1)[0]
        m2 = integrate.quad(lambda x: g(x) ** 2 * norm.pdf(x) / z, 0, 1)[0]
        var_indep = m2 - m1**2
        rng = np.random.default_rng(14)
        x = sample_truncnorm01(500_000, rng)
        assert abs(np.var(true_component("A", 0, x)) - var_indep) < 2e-3

        # the shared latent at full mixing concentrates the covariate and
        # shrinks the floor to about 0.08
        def dens(w, u):
            return norm.pdf(w) * norm.pdf(u) / z**2

        m1 = integrate.dblquad(lambda w, u: g((w + u) / 2) * dens(w, u), 0, 1, 0, 1)[0]
        m2 = integrate.dblquad(lambda w, u: g((w + u) / 2) ** 2 * dens(w, u), 0, 1, 0, 1)[0]
        var_dep = m2 - m1**2
        w = sample_truncnorm01(500_000, rng)
        u = sample_truncnorm01(500_000, rng)
        assert abs(np.var(true_component("A", 0, (w + u) / 2)) - var_dep) < 2e-3
        assert abs(var_dep - 0.08) < 0.01


class TestMonotonicityAudit:
    def test_clean_fit_has_no_violations(self):
        cfg = SimConfig(n=60, P=6, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(15))
        y = gen_response(X, "A", 0.3, np.random.default_rng(16), active=cfg.active)
        fit = fit_ms_lasso(X, y, grid_size=30, folds=5)
        audit = monotonicity_audit(fit)
        assert audit["violations"] == []
        for j in fit.support:
            if fit.sign_coherent[j]:
                assert j not in audit["incoherent"]

    def test_sign_mixed_block_is_flagged_not_violating(self):
        cfg = SimConfig(n=60, P=5, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(17))
        y = gen_response(X, "A", 0.3, np.random.default_rng(18), active=cfg.active)
        fit = fit_ms_lasso(X, y, lam=0.05, grid_size=20, folds=5)
        j = int(fit.support[0])
        beta = fit.beta.copy()
        g = fit.design.groups[j]
        beta[g.start] = 1.0
        beta[g.start + 1] = -1.0
        coherent = list(fit.sign_coherent)
        coherent[j] = False
        broken = dataclasses.replace(fit, beta=beta, sign_coherent=coherent)
        assert j in monotonicity_audit(broken)["incoherent"]

    def test_forced_nonmonotone_curve_is_a_violation(self):
        # flip signs inside a block but keep the coherence flag: the audit
        # must catch the non-monotone curve instead of trusting the flag
        cfg = SimConfig(n=60, P=5, replications=1)
        X = gen_covariates(cfg, np.random.default_rng(17))
        y = gen_response(X, "A", 0.3, np.random.default_rng(18), active=cfg.active)
        fit = fit_ms_lasso(X, y, lam=0.05, grid_size=20, folds=5)
        j = int(fit.support[0])
        beta = fit.beta.copy()
        g = fit.design.groups[j]
        beta[g] = 0.0
        beta[g.start] = 1.0
        beta[g.stop - 1] = -1.0
        coherent = list(fit.sign_coherent)
        coherent[j] = True
        broken = dataclasses.replace(fit, beta=beta, sign_coherent=coherent)
        assert j in monotonicity_audit(broken)["violations"]


class TestConfigValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SimConfig(t_dep=-0.5)
        with pytest.raises(ValueError):
            SimConfig(snr=0.0)
        with pytest.raises(ValueError):
            SimConfig(model="Z")
        with pytest.raises(ValueError):
            SimConfig(methods=("ms", "magic"))
        with pytest.raises(ValueError):
            SimConfig(methods=("ms", "ms"))
        with pytest.raises(ValueError):
            SimConfig(methods=())
        with pytest.raises(ValueError):
            SimConfig(P=3)
        with pytest.raises(ValueError):
            SimConfig(active=(0, 0, 1, 2))
        with pytest.raises(ValueError):
            SimConfig(jobs=0)
        with pytest.raises(ValueError):
            SimConfig(replications=0)

    def test_dict_round_trip(self):
        cfg = SimConfig(n=30, P=12, methods=("ms", "lasso"), active=(0, 2))
        again = SimConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            SimConfig.from_dict({"n": 30, "banana": 1})


@pytest.fixture(scope="module")
def small_report():
    cfg = SimConfig(
        n=50, P=10, snr=4.0, replications=2, seed=7,
        methods=("ms", "ams"), grid_size=30, folds=5,
    )
    return cfg, run_experiment(cfg)


class TestRunExperiment:
    def test_single_strong_signal_smoke(self):
        cfg = SimConfig(
            n=60, P=8, snr=math.inf, model="A", active=(0,), replications=1,
            seed=1, methods=("ms",), grid_size=30, folds=5,
        )
        report = run_experiment(cfg)
        assert report.sigma == 0.0
        rec = report.records[0]["methods"]["ms"]
        assert rec["tp"] == 1
        assert rec["fp"] <= 3
        assert report.errors == []

    def test_aggregates_match_manual_recomputation(self, small_report):
        cfg, report = small_report
        agg = aggregate_records(report.records, cfg)
        assert agg == report.aggregates
        ms = report.aggregates["ms"]
        assert ms["replications_ok"] == 2
        tps = [rep["methods"]["ms"]["tp"] for rep in report.records]
        npt.assert_allclose(ms["tp"]["mean"], np.mean(tps))
        npt.assert_allclose(ms["tp"]["sd"], np.std(tps, ddof=1))
        sel = [
            [float(j in rep["methods"]["ms"]["support"]) for j in cfg.active]
            for rep in report.records
        ]
        npt.assert_allclose(ms["selection"]["mean"], np.mean(sel, axis=0))
        for m in ("ms", "ams"):
            assert all(0.0 <= v <= 1.0 for v in report.aggregates[m]["selection"]["mean"])
            assert report.aggregates[m]["tp"]["mean"] <= len(cfg.active)
            assert all(v >= 0.0 for v in report.aggregates[m]["mse"]["mean"])

    def test_adaptive_stage_support_is_nested(self, small_report):
        cfg, report = small_report
        for rep in report.records:
            ms = set(rep["methods"]["ms"]["support"])
            ams = set(rep["methods"]["ams"]["support"])
            assert ams <= ms
            assert rep["methods"]["ams"]["fp"] <= rep["methods"]["ms"]["fp"]

    def test_records_are_reproducible_and_json_safe(self, small_report):
        cfg, report = small_report
        again = run_experiment(cfg)
        assert again.records == report.records
        assert again.sigma == report.sigma
        assert again.aggregates == report.aggregates
        parsed = json.loads(report.to_json())
        assert parsed["records"] == report.records

    def test_parallel_run_gives_identical_records(self, small_report):
        cfg, report = small_report
        par = run_experiment(dataclasses.replace(cfg, jobs=2))
        assert par.records == report.records

    def test_formatted_table_mentions_everything(self, small_report):
        cfg, report = small_report
        text = format_table(report)
        assert "Selection" in text
        assert "Estimation" in text
        for m in cfg.methods:
            assert any(line.startswith(m) for line in text.splitlines())
        assert "TP" in text and "FP" in text
