import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from qrip.exceptions import ParameterError
from qrip.gamma import (
    EmpiricalDistribution,
    GammaParams,
    SubExpParams,
    centered_log_mgf,
    gamma_cdf,
    gamma_pdf,
    gamma_sf,
    ks_2samp_critical_value,
    ks_2samp_statistic,
    ks_critical_coefficient,
    ks_critical_value,
    ks_statistic,
    lgamma,
    regularized_lower_gamma,
    regularized_upper_gamma,
    subexp_params_for_gamma,
    subexp_tail_bound,
    tail_bound,
    verify_mgf_bound,
)
from qrip.sampling import RngStream

mpmath.mp.dps = 40


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.5, 7.0, 33.3, 128.0, 1000.5, 1e4])
def test_lgamma_against_mpmath(x):
    exact = float(mpmath.loggamma(x))
    assert abs(lgamma(x) - exact) <= 1e-13 * max(1.0, abs(exact))


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 7.5, 32.0, 128.0, 512.0])
def test_incomplete_gamma_against_mpmath(a):
    z = a * np.array([0.01, 0.3, 0.8, 0.95, 1.0, 1.05, 1.2, 2.0, 4.0])
    P = np.atleast_1d(regularized_lower_gamma(a, z))
    Q = np.atleast_1d(regularized_upper_gamma(a, z))
    for zi, p, q in zip(z, P, Q):
        p_ref = float(mpmath.gammainc(a, 0, zi, regularized=True))
        q_ref = float(mpmath.gammainc(a, zi, mpmath.inf, regularized=True))
        assert abs(p - p_ref) <= 1e-12 * p_ref + 1e-300
        assert abs(q - q_ref) <= 1e-12 * q_ref + 1e-300


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 600), st.floats(0.0, 5.0))
def test_incomplete_gamma_against_scipy(a, ratio):
    z = a * ratio
    assert abs(regularized_lower_gamma(a, z) - special.gammainc(a, z)) < 1e-12
    assert abs(regularized_upper_gamma(a, z) - special.gammaincc(a, z)) < 1e-12


class TestDistribution:
    def test_params(self):
        p = GammaParams(3.0, 2.0)
        assert (p.mean, p.variance, p.mode) == (1.5, 0.75, 1.0)
        assert GammaParams.quaternion_rayleigh(64) == GammaParams(128, 128)
        assert GammaParams.real_rayleigh(64) == GammaParams(32, 32)
        assert GammaParams.chi_square(4) == GammaParams(2, 0.5)
        with pytest.raises(ParameterError):
            GammaParams(0.0, 1.0)

    def test_pdf_examples(self):
        assert np.isclose(gamma_pdf(GammaParams(1, 1), 1.0), math.exp(-1), rtol=1e-14)
        assert gamma_pdf(GammaParams(2, 1), 1e-300) < 1e-299
        assert gamma_pdf(GammaParams(2, 1), 0.0) == 0.0
        assert gamma_pdf(GammaParams(2, 1), -1.0) == 0.0

    def test_pdf_peak(self):
        p = GammaParams(128, 128)
        x = np.linspace(0.9, 1.1, 200_001)
        assert abs(x[np.argmax(gamma_pdf(p, x))] - 127 / 128) < 2e-6

    @pytest.mark.parametrize("alpha,beta", [(1, 1), (2, 2), (0.5, 0.5), (128, 128), (32, 32)])
    def test_pdf_matches_scipy_and_integrates(self, alpha, beta):
        p = GammaParams(alpha, beta)
        x = np.linspace(0.01, 5, 50)
        np.testing.assert_allclose(gamma_pdf(p, x), stats.gamma.pdf(x, alpha, scale=1 / beta), rtol=1e-11)
        f = lambda t: gamma_pdf(p, t)  # noqa: E731
        total = integrate.quad(f, 0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200, points=None)[0] \
            if alpha >= 1 else integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, np.inf, limit=200)[0]
        assert abs(total - 1) < 1e-8
        if alpha >= 1:
            mean = integrate.quad(lambda t: t * f(t), 0, np.inf, epsabs=1e-13, limit=200)[0]
            second = integrate.quad(lambda t: t * t * f(t), 0, np.inf, epsabs=1e-13, limit=200)[0]
            assert abs(mean - p.mean) < 1e-8
            assert abs(second - mean**2 - p.variance) < 1e-8

    def test_cdf_examples(self):
        assert gamma_cdf(GammaParams(3, 1), 0.0) == 0.0
        assert gamma_cdf(GammaParams(3, 1), -2.0) == 0.0
        assert np.isclose(gamma_cdf(GammaParams(1, 1), 1.0), 1 - math.exp(-1), rtol=1e-14)
        assert np.isclose(gamma_cdf(GammaParams(2, 2), 1.0), 1 - 3 * math.exp(-2), rtol=1e-14)
        assert np.isclose(gamma_sf(GammaParams(2, 2), 1.0), 3 * math.exp(-2), rtol=1e-13)

    def test_cdf_monotone(self):
        F = gamma_cdf(GammaParams(128, 128), np.linspace(0, 3, 10_000))
        assert np.all(np.diff(F) >= 0)
        assert F[0] == 0.0 and abs(F[-1] - 1) < 1e-15

    @pytest.mark.parametrize("m", [1, 4, 64])
    def test_chi_square_rescaling(self, m):
        x = np.linspace(0.05, 3, 60)
        lhs = gamma_cdf(GammaParams.quaternion_rayleigh(m), x)
        rhs = gamma_cdf(GammaParams.chi_square(4 * m), 4 * m * x)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-300)
        np.testing.assert_allclose(rhs, stats.chi2.cdf(4 * m * x, 4 * m), rtol=1e-10, atol=1e-300)


class TestSubExponential:
    def test_parameters(self):
        c = subexp_params_for_gamma(GammaParams.quaternion_rayleigh(64))
        assert np.isclose(c.sigma2, 5 / 256) and np.isclose(c.delta, 128 / 5)
        c = subexp_params_for_gamma(GammaParams(1, 1))
        assert np.isclose(c.sigma2, 5 / 2) and np.isclose(c.delta, 1 / 5)
        # Gamma(32, 32) has variance 1/32, so the proxy is (5/2)(1/32) = 5/64
        c = subexp_params_for_gamma(GammaParams.real_rayleigh(64))
        assert np.isclose(c.sigma2, 5 / 64) and np.isclose(c.delta, 32 / 5)
        with pytest.raises(ParameterError):
            SubExpParams(0.0, 1.0)

    def test_mgf_hand_value(self):
        p = GammaParams(1, 1)
        lhs = math.exp(centered_log_mgf(p, 0.2))
        assert np.isclose(lhs, 0.8**-1 * math.exp(-0.2), rtol=1e-14)
        assert round(lhs, 4) == 1.0234
        assert lhs <= math.exp(1.25 * 0.04)
        assert centered_log_mgf(p, 0.0) == 0.0

    def test_mgf_against_quadrature(self):
        p = GammaParams(4, 4)
        for t in (-0.8, 0.3, 0.8):
            ref = integrate.quad(lambda x: math.exp(t * (x - 1)) * gamma_pdf(p, x), 0, 60, limit=200)[0]
            assert np.isclose(math.exp(centered_log_mgf(p, t)), ref, rtol=1e-9)

    @pytest.mark.parametrize("m", [1, 4, 16, 64, 256])
    def test_grid_check_passes(self, m):
        for params in (GammaParams.quaternion_rayleigh(m), GammaParams.real_rayleigh(m)):
            rep = verify_mgf_bound(params, 1001)
            assert rep.passed and rep.max_ratio <= 1.0
            assert rep.max_ratio == 1.0 and rep.argmax_t == 0.0

    def test_grid_too_small(self):
        with pytest.raises(ParameterError):
            verify_mgf_bound(GammaParams(1, 1), 1)

    def test_tail_bound_values(self):
        assert tail_bound(64, 0.0) == 2.0
        assert round(tail_bound(64, 0.25), 4) == 0.4038
        assert round(tail_bound(64, 0.5), 5) == 0.00332
        with pytest.raises(ParameterError):
            tail_bound(64, 0.51)
        with pytest.raises(ParameterError):
            tail_bound(64, -0.1)

    def test_tail_bound_is_generic_bound_with_rayleigh_certificate(self):
        cert = subexp_params_for_gamma(GammaParams.quaternion_rayleigh(16))
        for t in (0.0, 0.1, 0.5):
            assert np.isclose(subexp_tail_bound(cert, t), tail_bound(16, t), rtol=1e-14)
        with pytest.raises(ParameterError):
            subexp_tail_bound(cert, 0.6)

    def test_tail_bound_dominates_exact_tail(self):
        for m in (1, 4, 64):
            p = GammaParams.quaternion_rayleigh(m)
            for t in np.linspace(0, 0.5, 11):
                exact = float(gamma_sf(p, 1 + t) + gamma_cdf(p, 1 - t))
                assert exact <= tail_bound(m, t)


class TestEmpirical:
    def test_ecdf_properties(self):
        d = EmpiricalDistribution([3.0, 1.0, 2.0, 2.0])
        values, F = d.ecdf()
        np.testing.assert_array_equal(values, [1, 2, 3])
        np.testing.assert_array_equal(F, [0.25, 0.75, 1.0])
        assert d.cdf(2.0) == 0.75 and d.cdf(0.5) == 0.0
        assert d.median() == 2.0 and d.mean == 2.0
        with pytest.raises(ParameterError):
            EmpiricalDistribution([])

    def test_csv_headers(self, tmp_path):
        d = EmpiricalDistribution([0.1, 0.2, 0.2, 0.9], bins=3)
        d.write_ecdf_csv(tmp_path / "e.csv")
        d.write_histogram_csv(tmp_path / "h.csv")
        e = (tmp_path / "e.csv").read_text().splitlines()
        h = (tmp_path / "h.csv").read_text().splitlines()
        assert e[0] == "value,ecdf" and e[1] == "0.1,0.25" and len(e) == 4
        assert h[0] == "bin_left,bin_right,count" and len(h) == 4
        assert sum(int(r.split(",")[2]) for r in h[1:]) == 4

    def test_ks_examples(self):
        p = GammaParams(3, 2)
        median = stats.gamma.ppf(0.5, 3, scale=0.5)
        assert abs(ks_statistic([median], p) - 0.5) < 1e-12
        N = 200
        q = stats.gamma.ppf(np.arange(1, N + 1) / (N + 1), 3, scale=0.5)
        assert ks_statistic(q, p) <= 1 / (N + 1) + 1e-12

    def test_ks_against_scipy(self):
        x = RngStream(4).normal(5000) ** 2
        p = GammaParams.chi_square(1)
        assert np.isclose(ks_statistic(x, p), stats.kstest(x, stats.chi2(1).cdf).statistic, rtol=1e-10)
        y = RngStream(5).normal(3000) ** 2
        assert np.isclose(ks_2samp_statistic(x, y), stats.ks_2samp(x, y).statistic, rtol=1e-12)

    def test_critical_values(self):
        assert round(ks_critical_coefficient(0.001), 2) == 1.95
        assert round(ks_critical_coefficient(0.01), 2) == 1.63
        assert np.isclose(ks_critical_value(10**5), ks_critical_coefficient(0.001) / math.sqrt(10**5))
        assert np.isclose(ks_2samp_critical_value(10**4, 10**4), ks_critical_coefficient(0.01) * math.sqrt(2e-4))
        # asymptotic Kolmogorov quantile as oracle
        assert np.isclose(ks_critical_coefficient(0.001), stats.kstwobign.isf(0.001), rtol=1e-3)
        with pytest.raises(ParameterError):
            ks_critical_coefficient(1.5)
