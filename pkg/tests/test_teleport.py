import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaussbench.benchmark import cft_gaussian, cft_squeezed
from gaussbench.teleport import (
    TwinBeamResource,
    benchmark_value,
    db_from_r,
    fidelity_avg_closed,
    fidelity_avg_mc,
    fidelity_avg_quadrature,
    fidelity_pointwise,
    min_threshold,
    r_from_db,
    region_map,
    threshold_r,
)

from oracles import teleport_fidelity_moments

BETAS = [0.3, 1.0, 2.0, 5.0, 20.0]
RS = [0.0, 0.3, 1.0, 2.0, 4.0]


class TestPointwise:
    @pytest.mark.parametrize("s, r, expected", [
        (0.0, 0.0, 0.5), (0.0, math.inf, 1.0), (1.0, 0.0, 1 / math.sqrt(2 + 2 * math.cosh(2.0))),
    ])
    def test_values(self, s, r, expected):
        assert fidelity_pointwise(s, r) == pytest.approx(expected, rel=1e-14)

    @given(st.floats(0.0, 4.0), st.floats(0.0, 2 * math.pi), st.floats(0.0, 5.0))
    def test_covariance_oracle(self, s, theta, r):
        assert fidelity_pointwise(s, r) == pytest.approx(teleport_fidelity_moments(s, theta, r), rel=1e-12)

    def test_monotone(self):
        r = np.linspace(0, 5, 50)
        assert np.all(np.diff(fidelity_pointwise(0.7, r)) > 0)
        s = np.linspace(0, 5, 50)
        assert np.all(np.diff(fidelity_pointwise(s, 0.7)) < 0)

    def test_no_overflow(self):
        assert fidelity_pointwise(800.0, 1.0) == 0.0
        assert fidelity_pointwise(1.0, 800.0) == 1.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            fidelity_pointwise(-0.1, 1.0)


class TestAverage:
    @pytest.mark.parametrize("beta", BETAS)
    def test_no_entanglement(self, beta):
        assert fidelity_avg_closed(beta, 0.0) == pytest.approx(beta / (2 * beta + 2), rel=1e-14)

    @pytest.mark.parametrize("r", RS)
    def test_vacuum_limit(self, r):
        assert fidelity_avg_closed(1e3, r) == pytest.approx(fidelity_avg_closed(math.inf, r), abs=1e-3)

    @pytest.mark.parametrize("beta", BETAS)
    @pytest.mark.parametrize("r", RS)
    def test_closed_vs_quadrature(self, beta, r):
        assert fidelity_avg_closed(beta, r) == pytest.approx(fidelity_avg_quadrature(beta, r), abs=1e-8)

    @pytest.mark.parametrize("beta, r", [(0.3, 1.0), (2.0, 0.3), (20.0, 4.0)])
    def test_monte_carlo(self, beta, r):
        est = fidelity_avg_mc(beta, r, seed=17)
        assert abs(est.mean - fidelity_avg_closed(beta, r)) <= 4 * est.std_error

    def test_worker_count_does_not_change_result(self):
        a = fidelity_avg_mc(1.0, 1.0, n_samples=200_000, seed=5, workers=1)
        b = fidelity_avg_mc(1.0, 1.0, n_samples=200_000, seed=5, workers=4)
        assert a == b

    def test_standard_error_scaling(self):
        a = fidelity_avg_mc(1.0, 1.0, n_samples=100_000, seed=1)
        b = fidelity_avg_mc(1.0, 1.0, n_samples=400_000, seed=2)
        assert a.std_error / b.std_error == pytest.approx(2.0, rel=0.2)

    @given(st.floats(0.05, 100.0), st.floats(0.0, 10.0), st.floats(0.0, 10.0))
    def test_monotone_in_r(self, beta, r1, r2):
        lo, hi = sorted((r1, r2))
        assert fidelity_avg_closed(beta, lo) <= fidelity_avg_closed(beta, hi) + 1e-12

    def test_invalid(self):
        with pytest.raises(ValueError):
            fidelity_avg_closed(0.0, 1.0)
        with pytest.raises(ValueError):
            fidelity_avg_mc(1.0, 1.0, n_samples=10)


class TestThreshold:
    @pytest.mark.parametrize("beta", [0.5, 3.0, 40.0])
    @pytest.mark.parametrize("lam", [0.0, 1.0, math.inf])
    def test_root(self, beta, lam):
        r = threshold_r(beta, lam)
        assert r is not None and r > 0
        assert fidelity_avg_closed(beta, r) == pytest.approx(benchmark_value(beta, lam), abs=1e-10)

    def test_coherent_benchmark_nearly_free_at_large_beta(self):
        assert threshold_r(1e3, 0.0) < 0.01

    def test_never(self):
        assert threshold_r(3.0, math.inf, r_max=0.5) is None

    def test_minimum_over_beta(self):
        best = min_threshold()
        assert best.r >= 1.151
        assert best.db == pytest.approx(db_from_r(best.r))
        assert 0.1 < best.beta < 50
        # interior minimum: both ends of the range need more squeezing
        assert threshold_r(0.1, math.inf) > best.r
        assert threshold_r(50.0, math.inf) > best.r

    def test_benchmark_value(self):
        assert benchmark_value(2.0, math.inf) == cft_squeezed(2.0)
        assert benchmark_value(2.0, 0.5) == cft_gaussian(0.5, 2.0)
        with pytest.raises(ValueError):
            benchmark_value(2.0, -1.0)


class TestDecibels:
    @given(st.floats(0.0, 20.0))
    def test_round_trip(self, r):
        assert r_from_db(db_from_r(r)) == pytest.approx(r, abs=1e-14)

    def test_three_db(self):
        # halving the variance is 10 log10(2) dB
        assert db_from_r(math.log(2) / 2) == pytest.approx(10 * math.log10(2))

    def test_resource(self):
        assert TwinBeamResource.from_db(6.0).db == pytest.approx(6.0)
        with pytest.raises(ValueError):
            TwinBeamResource(-1.0)


class TestRegionMap:
    def test_rows(self):
        rows = region_map([0.5, 5.0], [0.0, 1.0, 3.0])
        assert len(rows) == 6
        assert set(rows[0]) == {"beta", "r", "fidelity", "beats_lambda_0", "beats_lambda_inf"}
        # beating the squeezed-ensemble benchmark implies beating the looser Gaussian one
        for row in rows:
            assert not row["beats_lambda_inf"] or row["beats_lambda_0"]
        assert not rows[0]["beats_lambda_inf"] and rows[-1]["beats_lambda_inf"]

    def test_flags_match_threshold(self):
        r_star = threshold_r(2.0, math.inf)
        rows = region_map([2.0], [r_star - 1e-6, r_star + 1e-6])
        assert [row["beats_lambda_inf"] for row in rows] == [False, True]

    def test_invalid(self):
        with pytest.raises(ValueError):
            region_map([0.0], [1.0])
        with pytest.raises(ValueError):
            region_map([1.0], [-1.0])
