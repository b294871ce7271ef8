"""Unit tests for robust weights and the t-distribution sensor model."""

import numpy as np
import pytest
from scipy import stats

from edgevo.robust import (
    SIGMA_MIN,
    WEIGHT_KINDS,
    SensorModelFit,
    WeightFunction,
    compare_model_likelihoods,
    fit_sensor_model,
    mad_scale,
    scale_to_residuals,
    update_sigma_tdist,
    weight,
)


def all_kinds():
    return [WeightFunction(kind) for kind in WEIGHT_KINDS]


class TestWeightClosedForms:
    def test_least_squares_is_one(self):
        wf = WeightFunction("least_squares")
        assert weight(wf, 0.0) == 1.0
        assert weight(wf, 100.0) == 1.0

    def test_huber(self):
        wf = WeightFunction("huber", huber_k=1.345)
        assert weight(wf, 0.0) == 1.0
        assert weight(wf, 1.0) == 1.0
        assert weight(wf, 2.69) == pytest.approx(0.5)

    def test_tukey_hard_cutoff(self):
        wf = WeightFunction("tukey", tukey_c=4.6851)
        assert weight(wf, 4.6851) == pytest.approx(0.0, abs=1e-12)
        assert weight(wf, 10.0) == 0.0
        assert weight(wf, 0.0) == 1.0

    def test_cauchy(self):
        wf = WeightFunction("cauchy", cauchy_c=2.0)
        assert weight(wf, 2.0) == pytest.approx(0.5)

    def test_l1(self):
        wf = WeightFunction("l1")
        assert weight(wf, 4.0) == pytest.approx(0.25)
        assert weight(wf, 0.0) == pytest.approx(1e6)  # epsilon guard

    def test_t_distribution_at_zero(self):
        wf = WeightFunction("t_distribution", nu=5.0, sigma=1.0)
        assert weight(wf, 0.0) == pytest.approx(1.2)
        # normalizing by weight(0) gives 1
        assert weight(wf, 0.0) / 1.2 == pytest.approx(1.0)

    def test_t_weight_matches_density_derivative(self):
        # w(r) must equal -(1/2r) d log p / dr of the t density up to a
        # positive constant (here: 1/(nu sigma^2) absorbed by least squares).
        nu, sigma = 5.0, 1.3
        wf = WeightFunction("t_distribution", nu=nu, sigma=sigma)
        h = 1e-6
        rs = np.concatenate([[-0.5, 0.5], np.linspace(-4, 4, 100)])
        rs = rs[np.abs(rs) > 1e-3]
        analytic = np.asarray(weight(wf, rs))
        logp = lambda r: stats.t.logpdf(r, df=nu, scale=sigma)
        numeric = -(1.0 / (2.0 * rs)) * (logp(rs + h) - logp(rs - h)) / (2 * h)
        ratio = analytic / numeric
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-6)
        assert ratio[0] > 0

    def test_even_in_r(self):
        rs = np.linspace(0.0, 8.0, 200)
        for wf in all_kinds():
            np.testing.assert_allclose(weight(wf, rs), weight(wf, -rs), atol=1e-15)

    def test_non_increasing_in_abs_r(self):
        rs = np.linspace(0.0, 10.0, 500)
        for wf in all_kinds():
            w = np.asarray(weight(wf, rs))
            assert np.all(np.diff(w) <= 1e-12), wf.kind

    def test_bad_kind_and_params(self):
        with pytest.raises(ValueError):
            WeightFunction("acme")
        with pytest.raises(ValueError):
            WeightFunction("huber", huber_k=-1.0)


class TestIrlsConsistency:
    def test_least_squares_step_matches_plain_normal_equations(self):
        rng = np.random.default_rng(0)
        J = rng.normal(size=(50, 6))
        r = rng.normal(size=50)
        w = np.asarray(weight(WeightFunction("least_squares"), r))
        weighted = np.linalg.solve((J * w[:, None]).T @ J, (J * w[:, None]).T @ r)
        plain = np.linalg.solve(J.T @ J, J.T @ r)
        assert np.array_equal(weighted, plain)


class TestSigmaUpdate:
    def test_all_zero_residuals_hits_floor(self):
        assert update_sigma_tdist(np.zeros(100), 5.0, 1.0) == SIGMA_MIN

    def test_gaussian_limit_recovers_std(self):
        rng = np.random.default_rng(1)
        r = rng.normal(0.0, 2.0, 100_000)
        sigma = update_sigma_tdist(r, 1e6, 1.0)
        assert sigma == pytest.approx(2.0, rel=0.02)

    def test_t_self_consistency(self):
        rng = np.random.default_rng(2)
        r = rng.standard_t(5.0, 100_000) * 1.5
        sigma = update_sigma_tdist(r, 5.0, 1.0)
        assert sigma == pytest.approx(1.5, rel=0.05)

    def test_needs_enough_residuals(self):
        with pytest.raises(ValueError):
            update_sigma_tdist(np.ones(5), 5.0, 1.0)


class TestSensorModelFit:
    def test_recovers_t_parameters(self):
        rng = np.random.default_rng(3)
        r = rng.standard_t(4.0, 100_000) * 2.0
        fit = fit_sensor_model(r)
        assert 3.2 <= fit.nu0 <= 4.8
        assert fit.sigma0 == pytest.approx(2.0, rel=0.05)
        assert fit.sample_count == 100_000

    def test_gaussian_data_pushes_nu_high(self):
        rng = np.random.default_rng(4)
        r = rng.normal(0.0, 1.0, 50_000)
        fit = fit_sensor_model(r)
        assert fit.nu0 > 30.0

    def test_insufficient_data(self):
        with pytest.raises(ValueError):
            fit_sensor_model(np.ones(500))

    def test_fit_validation(self):
        with pytest.raises(ValueError):
            SensorModelFit(nu0=-1.0, sigma0=1.0, sample_count=10)


class TestModelRanking:
    def test_t_beats_gaussian_on_laplace_data(self):
        rng = np.random.default_rng(5)
        r = rng.laplace(0.0, 1.0, 20_000)
        ranking = dict(compare_model_likelihoods(r))
        assert ranking["t"] > ranking["gaussian"]

    def test_gaussian_wins_on_gaussian_data(self):
        rng = np.random.default_rng(6)
        r = rng.normal(0.0, 1.0, 20_000)
        ranking = compare_model_likelihoods(r)
        # gaussian and high-nu t are near ties; cauchy must lose clearly
        names = [name for name, _ in ranking]
        assert names.index("cauchy") > names.index("gaussian")

    def test_heavy_tail_ranking(self):
        rng = np.random.default_rng(7)
        r = rng.standard_t(3.0, 30_000) * 1.2
        ranking = compare_model_likelihoods(r)
        assert ranking[0][0] == "t"


class TestScaleAdaptation:
    def test_mad_scale_of_unit_gaussian(self):
        rng = np.random.default_rng(8)
        assert mad_scale(rng.normal(0, 1, 200_000)) == pytest.approx(1.0, rel=0.02)

    def test_thresholds_scale_with_spread(self):
        rng = np.random.default_rng(9)
        wf = WeightFunction("huber")
        scaled = scale_to_residuals(wf, rng.normal(0, 3.0, 10_000))
        assert scaled.huber_k == pytest.approx(1.345 * 3.0, rel=0.05)

    def test_non_mad_kinds_unchanged(self):
        wf = WeightFunction("t_distribution")
        assert scale_to_residuals(wf, np.ones(100)) is wf
