import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import arma, rel_err
from tempagg.process import (
    ArmaParams,
    DemandSeries,
    aggregate_demand_cross_cov,
    autocorrelation,
    autocovariance,
    autocovariances,
    geometric_sum,
    noa_autocovariance,
    noa_variance,
    oa_autocovariance,
    oa_autocovariances,
    simulate,
)

AR_HALF = ArmaParams(0.5, 0.0)
WN = ArmaParams(0.0, 0.0)


def brute_cov(params, a, b):
    """Covariance of sum(d[a]) and sum(d[b]) over explicit index sets."""
    return sum(autocovariance(params, abs(i - j)) for i in a for j in b)


class TestArmaParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(phi=1.0, theta=0.0),
            dict(phi=-1.0, theta=0.0),
            dict(phi=1 - 1e-10, theta=0.0),
            dict(phi=0.0, theta=1.0),
            dict(phi=0.0, theta=0.0, sigma2=0.0),
            dict(phi=np.nan, theta=0.0),
            dict(phi=0.0, theta=0.0, c=np.inf),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ArmaParams(**kwargs)

    def test_mean(self):
        assert ArmaParams(0.5, 0.1, c=2.0).mean == pytest.approx(4.0)


class TestAutocovariance:
    def test_white_noise_lag0(self):
        assert autocovariance(WN, 0) == 1.0

    def test_phi_equals_theta_cancels(self):
        assert autocovariance(ArmaParams(0.5, 0.5), 1) == 0.0

    def test_ar1_lag2(self):
        assert autocovariance(ArmaParams(0.5, 0.0, sigma2=2.0), 2) == pytest.approx(2 / 3, rel=1e-12)

    def test_negative_lag_rejected(self):
        with pytest.raises(ValueError):
            autocovariance(AR_HALF, -1)

    def test_vector_matches_scalar(self):
        p = ArmaParams(0.7, -0.3, 1.5)
        vec = autocovariances(p, 10)
        assert vec.shape == (11,)
        np.testing.assert_allclose(vec, [autocovariance(p, k) for k in range(11)], rtol=1e-14)

    @pytest.mark.parametrize("phi,theta,k,expected", [(0.5, 0.5, 1, 0.0), (0.5, 0.0, 1, 0.5), (-0.5, 0.0, 2, 0.25)])
    def test_autocorrelation(self, phi, theta, k, expected):
        assert autocorrelation(ArmaParams(phi, theta), k) == pytest.approx(expected, abs=1e-14)

    @given(arma, st.integers(2, 30))
    def test_geometric_recursion(self, p, k):
        assert autocovariance(p, k) == pytest.approx(p.phi * autocovariance(p, k - 1), rel=1e-12, abs=1e-300)

    @given(coef_phi=st.floats(-0.95, 0.95), k=st.integers(1, 10), s2=st.floats(0.1, 4))
    def test_white_noise_when_phi_equals_theta(self, coef_phi, k, s2):
        p = ArmaParams(coef_phi, coef_phi, s2)
        assert autocovariance(p, k) == 0.0
        assert noa_variance(p, 4) == pytest.approx(4 * p.gamma0, rel=1e-12)


class TestGeometricSum:
    def test_phi_zero(self):
        assert geometric_sum(0.0, 5) == 1.0

    @pytest.mark.parametrize("phi", [-0.9, 0.3, 0.999])
    def test_closed_form(self, phi):
        assert geometric_sum(phi, 7) == pytest.approx((1 - phi**7) / (1 - phi), rel=1e-10)


class TestAggregated:
    def test_noa_variance_white_noise(self):
        assert noa_variance(WN, 3) == pytest.approx(3.0)

    def test_noa_variance_m1(self):
        p = ArmaParams(0.3, -0.6)
        assert noa_variance(p, 1) == pytest.approx(p.gamma0, rel=1e-14)

    def test_noa_variance_ar_half(self):
        assert noa_variance(AR_HALF, 2) == pytest.approx(4.0, rel=1e-12)

    def test_noa_autocovariance_examples(self):
        assert noa_autocovariance(ArmaParams(0.2, 0.2), 3, 1) == 0.0
        assert noa_autocovariance(AR_HALF, 2, 1) == pytest.approx(1.5, rel=1e-12)
        assert noa_autocovariance(AR_HALF, 2, 2) == pytest.approx(0.375, rel=1e-12)

    @pytest.mark.parametrize("k,expected", [(0, 2.0), (1, 1.0), (2, 0.0)])
    def test_oa_autocovariance_white_noise(self, k, expected):
        assert oa_autocovariance(WN, 2, k) == pytest.approx(expected, abs=1e-15)

    def test_cross_cov_examples(self):
        assert aggregate_demand_cross_cov(ArmaParams(-0.4, -0.4), 5, 3) == 0.0
        assert aggregate_demand_cross_cov(AR_HALF, 2, 1) == pytest.approx(1.0, rel=1e-12)
        assert aggregate_demand_cross_cov(AR_HALF, 2, 2) == pytest.approx(0.5, rel=1e-12)

    def test_cross_cov_brute(self):
        p = ArmaParams(-0.6, 0.25, 1.3)
        for m, k in itertools.product(range(1, 6), range(1, 6)):
            expected = brute_cov(p, range(m), [-k])
            assert aggregate_demand_cross_cov(p, m, k) == pytest.approx(expected, rel=1e-12)

    @given(arma, st.integers(1, 6))
    def test_oa_lag0_is_noa_variance(self, p, m):
        assert oa_autocovariance(p, m, 0) == noa_variance(p, m) or rel_err(
            oa_autocovariance(p, m, 0), noa_variance(p, m)
        ) < 1e-12

    @given(arma, st.integers(1, 6))
    def test_m1_collapse(self, p, k):
        g = autocovariance(p, k)
        assert noa_autocovariance(p, 1, k) == pytest.approx(g, rel=1e-12, abs=1e-300)
        assert oa_autocovariance(p, 1, k) == pytest.approx(g, rel=1e-12, abs=1e-300)

    @settings(max_examples=40)
    @given(arma, st.integers(1, 6), st.integers(1, 6))
    def test_brute_force_index_sets(self, p, m, k):
        bucket = list(range(m))
        noa = brute_cov(p, bucket, [i + k * m for i in bucket])
        oa = brute_cov(p, bucket, [i + k for i in bucket])
        scale = m * m * p.gamma0
        assert abs(noa_autocovariance(p, m, k) - noa) <= 1e-12 * scale
        assert abs(oa_autocovariance(p, m, k) - oa) <= 1e-12 * scale

    def test_oa_vector_matches_scalar(self):
        p = ArmaParams(0.8, 0.1)
        vec = oa_autocovariances(p, 7, 20)
        np.testing.assert_allclose(vec, [oa_autocovariance(p, 7, k) for k in range(21)], rtol=1e-12)


class TestSimulate:
    def test_deterministic(self):
        p = ArmaParams(0.6, 0.3)
        a, b = simulate(p, 500, seed=7), simulate(p, 500, seed=7)
        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, simulate(p, 500, seed=8).values)

    def test_white_noise_variance(self):
        s = simulate(WN, 1_000_000, seed=1)
        assert abs(s.values.var() - 1.0) < 0.01

    def test_mean_level(self):
        p = ArmaParams(0.5, 0.2, c=3.0)
        s = simulate(p, 200_000, seed=2)
        assert s.values.mean() == pytest.approx(6.0, abs=0.05)

    def test_lag1_autocovariance(self):
        p = ArmaParams(0.8, 0.2)
        x = simulate(p, 1_000_000, seed=3).values
        x = x - x.mean()
        prod = x[:-1] * x[1:]
        # dependent products: inflate the naive SE by a batch-means estimate
        batches = prod[: len(prod) // 1000 * 1000].reshape(1000, -1).mean(axis=1)
        se = batches.std(ddof=1) / np.sqrt(batches.size)
        assert abs(prod.mean() - p.gamma1) < 3 * se


class TestDemandSeries:
    def test_read_only_and_indexing(self):
        s = DemandSeries([1, 2, 3], origin_index=1)
        assert s.at(1) == 1.0 and s.at(3) == 3.0
        with pytest.raises(IndexError):
            s.at(0)
        with pytest.raises(ValueError):
            s.values[0] = 5

    @pytest.mark.parametrize("bad", [[], [[1, 2]], [1.0, np.nan]])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            DemandSeries(bad)
