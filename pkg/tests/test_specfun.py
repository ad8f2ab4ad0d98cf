import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from gaussbench.specfun import (
    ConvergenceError,
    bessel_i0,
    gauss_2f1,
    gen_binomial,
    integrate_1d,
    log_binom_pos,
    log_half_binom,
)

from oracles import besseli0_mp, half_binom_exact, hyp2f1_mp


class TestBinomials:
    @pytest.mark.parametrize("x, n", [(5, 2), (2.5, 3), (-0.5, 4), (0.0, 0), (10.3, 7)])
    def test_matches_scipy(self, x, n):
        assert gen_binomial(x, n) == pytest.approx(special.binom(x, n), rel=1e-13)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            gen_binomial(1.0, -1)

    @pytest.mark.parametrize("n", [0, 1, 2, 7, 40, 150])
    def test_half_binomial_exact(self, n):
        assert math.exp(log_half_binom(n)) == pytest.approx(half_binom_exact(n), rel=1e-12)

    @given(st.floats(-0.9, 30.0), st.integers(0, 60))
    def test_log_binom_pos(self, x, n):
        assert log_binom_pos(x, n) == pytest.approx(math.log(gen_binomial(x + n, n)), abs=1e-10)

    @given(st.integers(0, 400))
    def test_chu_vandermonde(self, k):
        # sum_n binom(n-1/2, n) binom(k-n-1/2, k-n) = 1 for every k
        n = np.arange(k + 1)
        total = math.fsum(np.exp(log_half_binom(n) + log_half_binom(k - n)))
        assert total == pytest.approx(1.0, rel=1e-12)


class TestBessel:
    @pytest.mark.parametrize("z", [0.0, 1e-8, 0.5, 3.0, 25.0, 300.0, 700.0])
    def test_against_mpmath(self, z):
        assert bessel_i0(z) == pytest.approx(besseli0_mp(z), rel=1e-13)

    @pytest.mark.parametrize("z", [0.0, 1.0, 50.0, 1e3, 1e6])
    def test_scaled(self, z):
        import mpmath as mp
        ref = float(mp.besseli(0, z) * mp.exp(-z))
        assert bessel_i0(z, scaled=True) == pytest.approx(ref, rel=1e-13)

    def test_overflow_is_reported(self):
        with pytest.raises(OverflowError):
            bessel_i0(800.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bessel_i0(-1.0)

    def test_vectorized(self):
        z = np.linspace(0, 5, 7)
        np.testing.assert_allclose(bessel_i0(z), special.i0(z), rtol=1e-15)


class TestGauss2F1:
    def test_log2(self):
        assert gauss_2f1(1, 1, 2, -1) == pytest.approx(math.log(2), rel=1e-14)

    def test_zero_argument(self):
        assert gauss_2f1(0.3, 0.7, 1.1, 0.0) == 1.0

    @pytest.mark.parametrize("beta", [0.1, 0.5, 1.0, 2.0, 3.0, 10.0, 41.0, 200.0, 1000.0])
    @pytest.mark.parametrize("r", [0.01, 0.5, 2.0, 5.0, 10.0])
    def test_teleport_parameters(self, beta, r):
        a, b, c, z = 0.5, (beta + 1) / 2, (beta + 3) / 2, -math.sinh(r) ** 2
        rtol = 1e-10 if r > 8 and beta < 1 else 1e-12
        assert gauss_2f1(a, b, c, z) == pytest.approx(hyp2f1_mp(a, b, c, z), rel=rtol)

    @pytest.mark.parametrize("a, b, c, z", [
        (0.5, 1.0, 2.5, 0.95),      # c - a - b = 1, logarithmic continuation
        (1.0, 1.0, 2.0, 0.999),     # c - a - b = 0
        (0.3, 0.6, 1.4, 0.97),      # generic continuation
        (1.5, 1.0, 2.0, 0.93),      # c - a - b < 0
        (2.0, 3.0, 4.5, -50.0),
        (0.25, 0.5, 0.75, 0.5),
    ])
    def test_continuation_regimes(self, a, b, c, z):
        assert gauss_2f1(a, b, c, z) == pytest.approx(hyp2f1_mp(a, b, c, z), rel=1e-11)

    @pytest.mark.parametrize("offset", [1e-13, 2e-9, 1e-6, 1e-4, 3e-3])
    @pytest.mark.parametrize("m", [-1, 0, 2])
    @pytest.mark.parametrize("z", [0.999, -1e6])
    def test_near_integer_parameter_excess(self, offset, m, z):
        a, b = 0.5, 1.0
        c = a + b + m + offset
        assert gauss_2f1(a, b, c, z) == pytest.approx(hyp2f1_mp(a, b, c, z), rel=1e-11)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.1, 8.0), st.floats(-1e4, 0.85))
    def test_random_parameters(self, a, b, c, z):
        ref = hyp2f1_mp(a, b, c, z)
        assert gauss_2f1(a, b, c, z) == pytest.approx(ref, rel=1e-9, abs=1e-300)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            gauss_2f1(1, 1, -2, 0.1)
        with pytest.raises(ValueError):
            gauss_2f1(1, 1, 2, 1.0)

    def test_nonconvergence_raises(self):
        with pytest.raises(ConvergenceError):
            gauss_2f1(0.5, 0.5, 1.2, 0.89, max_terms=10)


class TestIntegrate:
    @pytest.mark.parametrize("mapping", ["tanh", "rational"])
    def test_exponential(self, mapping):
        res = integrate_1d(lambda x: math.exp(-x), 0.0, math.inf, mapping=mapping)
        assert res.converged
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_cosh_power(self):
        # int_0^inf sinh s / cosh^{b+1} s ds = 1/b
        for b in (0.5, 2.0, 9.0):
            res = integrate_1d(lambda s: math.sinh(s) / math.cosh(s) ** (b + 1), 0.0, math.inf)
            assert res.value == pytest.approx(1 / b, rel=1e-10)

    def test_finite_and_reversed(self):
        assert integrate_1d(math.sin, 0.0, math.pi).value == pytest.approx(2.0, abs=1e-13)
        assert integrate_1d(math.sin, math.pi, 0.0).value == pytest.approx(-2.0, abs=1e-13)

    def test_nan_reports_location(self):
        with pytest.raises(FloatingPointError, match="x="):
            integrate_1d(lambda x: math.nan if x > 0.5 else 1.0, 0.0, 1.0)

    def test_flags_nonconvergence(self):
        res = integrate_1d(lambda x: math.sin(200 * x) ** 2, 0.0, 50.0, limit=3)
        assert not res.converged

    def test_unknown_mapping(self):
        with pytest.raises(ValueError):
            integrate_1d(math.exp, 0.0, math.inf, mapping="bogus")
