"""Distribution-level tests: closed forms against quadrature oracles."""

import math

import numpy as np
import pytest
from scipy import stats

from alrisk import (
    AldParams,
    cdf,
    log_pdf,
    moments,
    quantile,
    sample,
    tail_expectation,
)
from alrisk.exceptions import DomainError, InputError

import oracles


STD_LAPLACE = AldParams(0.0, 1.0, 1.0)
SKEWED = AldParams(0.0, 1.0, 2.0)


class TestParams:
    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(DomainError):
            AldParams(0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            AldParams(0.0, -1.0, 1.0)

    def test_rejects_nonpositive_p(self):
        with pytest.raises(DomainError):
            AldParams(0.0, 1.0, 0.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            AldParams(np.inf, 1.0, 1.0)
        with pytest.raises(DomainError):
            AldParams(0.0, np.nan, 1.0)


class TestLogPdf:
    def test_symmetric_laplace_at_mode(self):
        assert log_pdf(0.0, STD_LAPLACE) == pytest.approx(math.log(0.5), abs=1e-12)

    def test_direct_evaluation_skewed(self):
        # f(1; 0, 1, 2) = (2/5) exp(-2)
        assert log_pdf(1.0, SKEWED) == pytest.approx(math.log(0.4) - 2.0, abs=1e-12)

    def test_normalization_by_quadrature(self):
        total = oracles.quad_split(
            lambda x: math.exp(log_pdf(x, SKEWED)), 0.0, 1.0, 2.0
        )
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_kink_belongs_to_upper_branch(self):
        # both branches agree in value at x = mu, so the pdf is continuous
        eps = 1e-12
        assert log_pdf(0.0, SKEWED) == pytest.approx(log_pdf(eps, SKEWED), abs=1e-10)

    def test_finite_for_extreme_arguments(self):
        assert np.isfinite(log_pdf(1e6, SKEWED))
        assert np.isfinite(log_pdf(-1e6, SKEWED))

    def test_symmetry_at_p_one(self):
        params = AldParams(0.7, 1.3, 1.0)
        for d in (0.1, 1.0, 4.2):
            assert log_pdf(params.mu + d, params) == pytest.approx(
                log_pdf(params.mu - d, params), abs=1e-12
            )


class TestCdf:
    def test_value_at_location(self):
        assert cdf(0.0, STD_LAPLACE) == pytest.approx(0.5, abs=1e-15)
        assert cdf(0.0, SKEWED) == pytest.approx(0.8, abs=1e-15)

    def test_matches_quadrature(self):
        # frozen from oracles.cdf_quad(-1, 0, 1, 1)
        assert cdf(-1.0, STD_LAPLACE) == pytest.approx(0.18393972058572117, abs=1e-10)

    def test_monotone_with_unit_limits(self):
        xs = np.linspace(-40.0, 40.0, 401)
        vals = cdf(xs, SKEWED)
        assert np.all(np.diff(vals) >= 0.0)
        assert vals[0] < 1e-6 and vals[-1] > 1 - 1e-6


class TestQuantile:
    def test_median_of_symmetric_case(self):
        assert quantile(0.5, AldParams(3.0, 1.0, 1.0)) == pytest.approx(3.0, abs=1e-12)

    def test_against_bisection_oracle(self):
        # frozen from oracles.quantile_bisect
        assert quantile(0.01, STD_LAPLACE) == pytest.approx(
            -3.912023005428146, abs=1e-9
        )
        assert quantile(0.5, SKEWED) == pytest.approx(-0.9400072584914715, abs=1e-9)

    def test_roundtrip_with_cdf(self):
        for alpha in (1e-4, 0.01, 0.3, 0.8, 0.99, 1 - 1e-4):
            assert cdf(quantile(alpha, SKEWED), SKEWED) == pytest.approx(
                alpha, abs=1e-12
            )

    def test_rejects_alpha_outside_open_interval(self):
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(DomainError):
                quantile(bad, STD_LAPLACE)

    def test_symmetry_at_p_one(self):
        params = AldParams(1.5, 2.0, 1.0)
        for alpha in (0.05, 0.2, 0.45):
            assert quantile(alpha, params) + quantile(1 - alpha, params) == (
                pytest.approx(2 * params.mu, abs=1e-10)
            )


class TestMoments:
    def test_symmetric_case(self):
        m = moments(AldParams(0.3, 2.0, 1.0))
        assert m.mean == pytest.approx(0.3, abs=1e-14)
        assert m.skewness == 0.0
        assert m.excess_kurtosis == pytest.approx(3.0, abs=1e-14)

    def test_skewed_case_against_quadrature(self):
        # frozen from oracles.moments_quad(0, 1, 2)
        m = moments(SKEWED)
        assert m.mean == pytest.approx(-1.5, abs=1e-9)
        assert m.variance == pytest.approx(4.25, abs=1e-9)
        assert m.skewness == pytest.approx(-1.797616986, abs=1e-6)
        assert m.excess_kurtosis == pytest.approx(5.335640138, abs=1e-6)

    def test_skewness_sign_follows_one_minus_p(self):
        assert moments(AldParams(0, 1, 0.5)).skewness > 0
        assert moments(AldParams(0, 1, 2.0)).skewness < 0

    def test_excess_kurtosis_range(self):
        for p in (0.2, 0.7, 1.0, 1.9, 5.0):
            ek = moments(AldParams(0, 1, p)).excess_kurtosis
            assert 0.0 < ek < 6.0


class TestSample:
    def test_deterministic(self):
        a = sample(SKEWED, 1000, seed=42)
        b = sample(SKEWED, 1000, seed=42)
        assert np.array_equal(a, b)

    def test_empty_request_rejected(self):
        with pytest.raises(InputError):
            sample(SKEWED, 0, seed=1)

    def test_large_sample_mean(self):
        n = 10**6
        draws = sample(SKEWED, n, seed=7)
        sd = math.sqrt(moments(SKEWED).variance)
        assert abs(draws.mean() - (-1.5)) < 3 * sd / math.sqrt(n)

    def test_ks_against_cdf(self):
        draws = sample(SKEWED, 10**5, seed=11)
        stat = stats.kstest(draws, lambda x: cdf(x, SKEWED))
        assert stat.pvalue > 0.01


class TestTailExpectation:
    def test_symmetric_one_percent(self):
        # frozen from oracles.tail_expectation_quad(0.01, 0, 1, 1)
        assert tail_expectation(0.01, STD_LAPLACE) == pytest.approx(
            -4.912023005428146, abs=1e-8
        )

    def test_branch_boundary(self):
        p = 2.0
        alpha = p * p / (1 + p * p)
        assert tail_expectation(alpha, SKEWED) == pytest.approx(-2.0, abs=1e-8)

    def test_upper_branch_matches_quadrature(self):
        # alpha above the lower-branch mass exercises the quadrature path
        alpha = 0.9
        expect = oracles.tail_expectation_quad(alpha, 0.0, 1.0, 2.0)
        assert tail_expectation(alpha, SKEWED) == pytest.approx(expect, abs=1e-8)

    def test_always_below_quantile(self):
        for alpha in (0.01, 0.3, 0.79, 0.8, 0.81, 0.95):
            assert tail_expectation(alpha, SKEWED) < quantile(alpha, SKEWED)

    def test_nondecreasing_in_alpha(self):
        alphas = np.linspace(0.01, 0.99, 25)
        es = [tail_expectation(a, SKEWED) for a in alphas]
        q = [quantile(a, SKEWED) for a in alphas]
        assert np.all(np.diff(es) > 0)
        assert np.all(np.diff(q) > 0)

    def test_rejects_bad_alpha(self):
        with pytest.raises(DomainError):
            tail_expectation(0.0, SKEWED)


class TestRandomizedGrid:
    """Closed forms vs oracles over a randomized valid parameter grid."""

    GRID = oracles.parameter_grid(30, seed=999)

    @pytest.mark.parametrize("mu,sigma,p", GRID[:10].tolist())
    def test_normalization(self, mu, sigma, p):
        params = AldParams(mu, sigma, p)
        total = oracles.quad_split(
            lambda x: math.exp(log_pdf(x, params)), mu, sigma, p
        )
        assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("mu,sigma,p", GRID[:10].tolist())
    def test_moments(self, mu, sigma, p):
        m = moments(AldParams(mu, sigma, p))
        om, ov, os_, ok = oracles.moments_quad(mu, sigma, p)
        assert m.mean == pytest.approx(om, rel=1e-6, abs=1e-9)
        assert m.variance == pytest.approx(ov, rel=1e-6)
        assert m.skewness == pytest.approx(os_, rel=1e-6, abs=1e-9)
        assert m.excess_kurtosis == pytest.approx(ok, rel=1e-6)

    @pytest.mark.parametrize("mu,sigma,p", GRID[:10].tolist())
    def test_quantile_roundtrip(self, mu, sigma, p):
        params = AldParams(mu, sigma, p)
        for alpha in (1e-4, 0.01, 0.5, 0.99, 1 - 1e-4):
            assert abs(cdf(quantile(alpha, params), params) - alpha) < 1e-12
