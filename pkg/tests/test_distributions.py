import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfmeta.distributions import (
    chisq_sf,
    h_factor,
    log_gamma,
    nct_logpdf,
    nct_pdf,
    normal_cdf,
    normal_quantile,
    t_logpdf,
    t_pdf,
    t_sf2,
)
from bfmeta.distributions import _nct_logpdf_series
from bfmeta.errors import DomainError
from bfmeta.quadrature import adaptive_gauss_kronrod

SQRT_PI = math.sqrt(math.pi)


class TestLogGamma:
    def test_exact_integers(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
        assert log_gamma(0.5) == pytest.approx(math.log(SQRT_PI), abs=1e-14)

    def test_half_integer_product(self):
        # Gamma(6.5) = 5.5 * 4.5 * 3.5 * 2.5 * 1.5 * 0.5 * sqrt(pi)
        product = 5.5 * 4.5 * 3.5 * 2.5 * 1.5 * 0.5 * SQRT_PI
        assert log_gamma(6.5) == pytest.approx(math.log(product), abs=1e-12)
        assert math.log(product) == pytest.approx(5.662562059857142, abs=1e-12)

    def test_accuracy_against_mpmath(self):
        # 1e-12 absolute wherever float64 can represent it; ULP-level
        # relative accuracy beyond (ln Gamma(1e6) ~ 1.3e7, ULP ~ 4e-9)
        mp = pytest.importorskip("mpmath")
        for z in [0.5, 0.77, 1.3, 6.5, 50.0, 700.0]:
            exact = float(mp.loggamma(mp.mpf(z)))
            assert log_gamma(z) == pytest.approx(exact, abs=1e-12)
        for z in [1e4, 1e6]:
            exact = float(mp.loggamma(mp.mpf(z)))
            assert log_gamma(z) == pytest.approx(exact, rel=1e-14)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            log_gamma(0.0)
        with pytest.raises(DomainError):
            log_gamma(-3.2)


class TestTPdf:
    def test_cauchy_at_zero(self):
        assert t_pdf(0.0, 1.0) == pytest.approx(1.0 / math.pi, abs=1e-15)

    def test_normal_limit(self):
        assert t_pdf(0.0, 1e6) == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-4)

    def test_against_cdf_slope_oracle(self):
        # frozen central difference of scipy's t CDF (betainc path)
        assert t_pdf(2.0, 5.0) == pytest.approx(0.06509031032621647, abs=1e-9)

    def test_symmetry(self):
        grid = np.linspace(0.0, 8.0, 41)
        np.testing.assert_allclose(t_pdf(grid, 7), t_pdf(-grid, 7), rtol=0, atol=0)


class TestNctPdf:
    def test_central_reduction_pointwise(self):
        grid = np.linspace(-10.0, 10.0, 81)
        for nu in (3.0, 14.0, 100.0):
            np.testing.assert_allclose(
                nct_pdf(grid, nu, 0.0), t_pdf(grid, nu), rtol=0, atol=1e-12
            )

    @pytest.mark.parametrize("nu", [3.0, 14.0, 100.0])
    @pytest.mark.parametrize("delta", [-5.0, 0.0, 2.0, 10.0])
    def test_normalizes_to_one(self, nu, delta):
        def integrand(u):
            t = delta + np.tan(u)
            return nct_pdf(t, nu, delta) / np.cos(u) ** 2

        pts = np.arctan(np.array([-300.0, -30.0, -5.0, 0.0, 5.0, 30.0, 300.0]))
        pts = np.concatenate([[-np.pi / 2], pts, [np.pi / 2]])
        value, _ = adaptive_gauss_kronrod(integrand, np.unique(pts), epsabs=1e-10)
        assert value == pytest.approx(1.0, abs=1e-6)

    def test_monte_carlo_histogram_oracle(self):
        # brute force: density of (Z + delta) / sqrt(chi2_nu / nu) at t = 3.6
        rng = np.random.default_rng(20240817)
        n = 10_000_000
        draws = (rng.standard_normal(n) + 2.0) / np.sqrt(rng.chisquare(14, n) / 14.0)
        width = 0.04
        mc_density = np.mean(np.abs(draws - 3.6) < width / 2) / width
        value = nct_pdf(3.6, 14.0, 2.0)
        assert value == pytest.approx(mc_density, abs=1e-3)
        # frozen arbitrary-precision value of the same density
        assert value == pytest.approx(0.1264229584437075, abs=1e-12)

    @pytest.mark.parametrize(
        "t, nu, delta, expected",
        [
            (-1.5, 14.0, 2.0, 0.0011619564777064773),
            (2.5, 3.0, -4.0, 1.7203745686553033e-07),
            (0.7, 100.0, 10.0, 7.429781338329794e-20),
            (-3.0, 7.0, -2.5, 0.2735049974663883),
            (30.0, 1000.0, 29.0, 0.23369517304700316),
        ],
    )
    def test_frozen_high_precision_values(self, t, nu, delta, expected):
        # covers both the series (t*delta >= 0) and mixture (t*delta < 0) paths
        assert nct_pdf(t, nu, delta) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_series_and_mixture_paths_agree(self):
        # evaluate the positive-x region through both code paths
        from bfmeta.distributions import _nct_logpdf_mixture
        import scipy.special as sp

        nu = 14.0
        t = np.linspace(0.1, 12.0, 25)
        delta = np.full_like(t, 3.0)
        x = np.sqrt(2.0) * t * delta / np.sqrt(nu + t * t)
        series = _nct_logpdf_series(t, nu, delta, x)
        a = nu + t * t
        disc = np.sqrt(t * t * delta * delta + 4.0 * nu * a)
        s_star = (t * delta + disc) / (2.0 * a)
        h_star = nu * np.log(s_star) - 0.5 * nu * s_star**2 - 0.5 * (s_star * t - delta) ** 2
        ln_c = (
            np.log(2.0) + 0.5 * nu * np.log(0.5 * nu)
            - sp.gammaln(0.5 * nu) - 0.5 * np.log(2.0 * np.pi)
        )
        mixture = _nct_logpdf_mixture(t, nu, delta, a, s_star, h_star, ln_c)
        np.testing.assert_allclose(series, mixture, rtol=0, atol=1e-11)

    def test_underflow_is_clean_zero(self):
        assert nct_pdf(-5.0, 10.0, 50.0) == 0.0
        assert nct_logpdf(-5.0, 10.0, 50.0) == -np.inf

    def test_nonnegative_everywhere(self):
        grid = np.linspace(-60, 60, 201)
        for delta in (-10.0, -1.0, 0.0, 2.5, 30.0):
            assert np.all(nct_pdf(grid, 5.0, delta) >= 0.0)


class TestTSf2:
    def test_at_zero(self):
        assert t_sf2(0.0, 10.0) == 1.0

    def test_normal_limit(self):
        assert t_sf2(3.8416, 1e6) == pytest.approx(0.05, abs=1e-4)

    def test_tail_integral_oracle(self):
        # frozen: 2 * integral of the t_10 density over [2, inf)
        assert t_sf2(4.0, 10.0) == pytest.approx(0.07338803477074038, abs=1e-10)

    def test_strictly_decreasing(self):
        grid = np.linspace(0.0, 40.0, 200)
        values = t_sf2(grid, 7.0)
        assert np.all(np.diff(values) < 0.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            t_sf2(-0.5, 10.0)


class TestNormalChisq:
    def test_cdf_center(self):
        assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-16)

    def test_quantile_round_trip(self):
        for x in range(-3, 4):
            assert normal_quantile(normal_cdf(float(x))) == pytest.approx(
                float(x), abs=1e-9
            )

    def test_quantile_domain(self):
        for bad in (0.0, 1.0, -0.1, 1.7):
            with pytest.raises(DomainError):
                normal_quantile(bad)

    def test_chisq_sf_at_zero(self):
        assert chisq_sf(0.0, 4) == 1.0

    def test_cdf_monotone(self):
        grid = np.linspace(-8, 8, 200)
        assert np.all(np.diff(normal_cdf(grid)) >= 0.0)


class TestHFactor:
    def test_half_integer_products(self):
        # z = 7: H = sqrt(7) Gamma(6.5) / Gamma(7), all factors exact
        gamma65 = 5.5 * 4.5 * 3.5 * 2.5 * 1.5 * 0.5 * SQRT_PI
        expected = math.sqrt(7.0) * gamma65 / 720.0
        assert h_factor(7.0) == pytest.approx(expected, abs=1e-10)
        assert expected == pytest.approx(1.0579, abs=5e-5)

    def test_integer_and_half_integer_grid(self):
        # direct Gamma products: Gamma(k) = (k-1)!, Gamma(k + 1/2) by product
        for k in range(1, 12):
            gamma_int = math.factorial(k - 1)
            gamma_half = SQRT_PI
            for j in range(k):
                gamma_half *= j + 0.5
            # z = k + 1/2: H = sqrt(z) Gamma(k) / Gamma(k + 1/2)
            assert h_factor(k + 0.5) == pytest.approx(
                math.sqrt(k + 0.5) * gamma_int / gamma_half, rel=1e-10
            )
            if k >= 1:
                # z = k: H = sqrt(k) Gamma(k - 1/2) / Gamma(k)
                gamma_half_minus = SQRT_PI
                for j in range(k - 1):
                    gamma_half_minus *= j + 0.5
                assert h_factor(float(k)) == pytest.approx(
                    math.sqrt(float(k)) * gamma_half_minus / gamma_int, rel=1e-10
                )

    def test_sqrt_pi_at_one(self):
        assert h_factor(1.0) == pytest.approx(SQRT_PI, abs=1e-12)

    def test_asymptote(self):
        assert h_factor(1e6) == pytest.approx(1.0, abs=1e-5)

    def test_domain(self):
        with pytest.raises(DomainError):
            h_factor(0.5)


@settings(max_examples=50, deadline=None)
@given(
    t=st.floats(-30, 30),
    nu=st.floats(0.5, 1000),
    delta=st.floats(-20, 20),
)
def test_density_nonnegative_property(t, nu, delta):
    assert nct_pdf(t, nu, delta) >= 0.0
    assert t_pdf(t, nu) > 0.0
