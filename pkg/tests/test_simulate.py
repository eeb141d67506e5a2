"""Distributional checks for the samplers."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special, stats

from mevlab.errors import UsageError
from mevlab.model import AsymLogisticParams, LogisticParams
from mevlab.simulate import (
    SeedSpec,
    apply_truncated_t_margins,
    sample_asym_logistic_maxstable,
    sample_logistic_maxstable,
    sample_opclayton,
    sample_positive_stable,
    sample_study_data,
)


class TestSeedSpec:
    def test_reproducible(self):
        a = SeedSpec(123, 4).rng().uniform(size=5)
        b = SeedSpec(123, 4).rng().uniform(size=5)
        assert_allclose(a, b)

    def test_streams_differ(self):
        a = SeedSpec(123, 0).rng().uniform(size=5)
        b = SeedSpec(123, 1).rng().uniform(size=5)
        assert not np.allclose(a, b)

    def test_interleaving_free(self):
        # consuming stream 0 does not perturb stream 1
        s0 = SeedSpec(9, 0).rng()
        s0.uniform(size=1000)
        b = SeedSpec(9, 1).rng().uniform(size=3)
        assert_allclose(b, SeedSpec(9, 1).rng().uniform(size=3))


class TestPositiveStable:
    def test_degenerate_at_one(self):
        S = sample_positive_stable(1.0, SeedSpec(0), size=100)
        assert np.all(S == 1.0)

    def test_levy_half_cdf(self):
        # alpha = 1/2 is the Levy law with Pr(S <= 1) = erfc(1/2)
        S = sample_positive_stable(0.5, SeedSpec(1), size=100_000)
        assert abs(np.mean(S <= 1.0) - special.erfc(0.5)) < 0.01

    @pytest.mark.parametrize("alpha", [0.15, 0.4, 0.7, 0.95])
    def test_laplace_transform_at_one(self, alpha):
        S = sample_positive_stable(alpha, SeedSpec(2), size=100_000)
        assert abs(np.mean(np.exp(-S)) - math.exp(-1.0)) < 0.005

    def test_alpha_domain(self):
        with pytest.raises(UsageError):
            sample_positive_stable(1.2, SeedSpec(0))

    def test_stable_near_independence_bound(self):
        # direct powers underflow here; the log-space form must stay finite
        S = sample_positive_stable(0.999, SeedSpec(16), size=50_000)
        assert np.all(np.isfinite(S)) and np.all(S > 0)
        assert abs(np.mean(np.exp(-S)) - math.exp(-1.0)) < 0.005
        U = sample_opclayton(5_000, 2, 0.999, SeedSpec(17))
        assert np.all((U > 0) & (U < 1))


class TestLogisticMaxStable:
    def test_unit_frechet_margins(self):
        Z = sample_logistic_maxstable(100_000, 2, LogisticParams(0.4), SeedSpec(3))
        for d in range(2):
            assert abs(np.mean(Z[:, d] <= 1.0) - math.exp(-1.0)) < 0.01

    @pytest.mark.parametrize("alpha", [0.3, 0.7])
    def test_joint_cdf_at_unit_point(self, alpha):
        Z = sample_logistic_maxstable(100_000, 2, LogisticParams(alpha), SeedSpec(4))
        got = np.mean((Z[:, 0] <= 1.0) & (Z[:, 1] <= 1.0))
        assert abs(got - math.exp(-(2.0**alpha))) < 0.01

    def test_independence_at_one(self):
        Z = sample_logistic_maxstable(20_000, 2, LogisticParams(1.0), SeedSpec(5))
        tau = stats.kendalltau(Z[:, 0], Z[:, 1]).statistic
        assert abs(tau) < 0.011

    def test_extremal_coefficient_recovery(self):
        # -1/log Pr(both <= z) should track V(z, z) = 2^alpha / z
        alpha = 0.55
        Z = sample_logistic_maxstable(200_000, 2, LogisticParams(alpha), SeedSpec(6))
        for z in (0.7, 1.0, 1.8):
            pr = np.mean(np.max(Z, axis=1) <= z)
            se = math.sqrt(pr * (1 - pr) / Z.shape[0])
            V_emp = -math.log(pr)
            V_true = 2.0**alpha / z
            # delta method on -log
            assert abs(V_emp - V_true) < 3 * se / pr

    def test_dimension_and_determinism(self):
        Z1 = sample_logistic_maxstable(50, 5, LogisticParams(0.5), SeedSpec(7, 3))
        Z2 = sample_logistic_maxstable(50, 5, LogisticParams(0.5), SeedSpec(7, 3))
        assert Z1.shape == (50, 5)
        assert_allclose(Z1, Z2)


class TestAsymLogistic:
    def test_embedding_matches_logistic_distribution(self):
        params = AsymLogisticParams.logistic_embedding(2, 0.5)
        Z = sample_asym_logistic_maxstable(50_000, params, SeedSpec(8))
        got = np.mean((Z[:, 0] <= 1.0) & (Z[:, 1] <= 1.0))
        assert abs(got - math.exp(-(2.0**0.5))) < 0.012

    def test_singleton_mass_is_independence(self):
        params = AsymLogisticParams(
            2, {}, {(frozenset({0}), 0): 1.0, (frozenset({1}), 1): 1.0}
        )
        Z = sample_asym_logistic_maxstable(20_000, params, SeedSpec(9))
        tau = stats.kendalltau(Z[:, 0], Z[:, 1]).statistic
        assert abs(tau) < 0.015

    def test_margins_stay_unit_frechet_with_mixed_mass(self):
        both = frozenset({0, 1})
        params = AsymLogisticParams(
            2,
            {both: 0.4},
            {(both, 0): 0.3, (both, 1): 0.8,
             (frozenset({0}), 0): 0.7, (frozenset({1}), 1): 0.2},
        )
        Z = sample_asym_logistic_maxstable(100_000, params, SeedSpec(10))
        for d in range(2):
            assert abs(np.mean(Z[:, d] <= 1.0) - math.exp(-1.0)) < 0.01


class TestOpClayton:
    def test_kendall_tau_alpha_one(self):
        # alpha = 1 is Clayton(theta=1); the Archimedean tau integral
        # tau = 1 + 4 int phi_inv(t)/phi_inv'(t) dt gives exactly 1/3
        def phi_inv(u):
            return ((1.0 - u) / u) ** 1.0

        def dphi_inv(u):
            h = 1e-6
            return (phi_inv(u + h) - phi_inv(u - h)) / (2 * h)

        integral, _ = integrate.quad(lambda t: phi_inv(t) / dphi_inv(t), 1e-9, 1 - 1e-9)
        tau_true = 1.0 + 4.0 * integral
        assert_allclose(tau_true, 1.0 / 3.0, atol=1e-6)

        U = sample_opclayton(100_000, 2, 1.0, SeedSpec(11))
        tau = stats.kendalltau(U[:, 0], U[:, 1]).statistic
        assert abs(tau - 1.0 / 3.0) < 0.01

    def test_margins_uniform(self):
        U = sample_opclayton(100_000, 2, 0.6, SeedSpec(12))
        for d in range(2):
            assert stats.kstest(U[:, d], "uniform").pvalue > 0.01

    def test_tau_increases_as_alpha_drops(self):
        taus = []
        for i, alpha in enumerate((0.8, 0.5, 0.2)):
            U = sample_opclayton(30_000, 2, alpha, SeedSpec(13, i))
            taus.append(stats.kendalltau(U[:, 0], U[:, 1]).statistic)
        assert taus[0] < taus[1] < taus[2]

    @pytest.mark.slow
    def test_upper_tail_dependence_matches_logistic_limit(self):
        # domain-of-attraction oracle: chi(q) -> 2 - 2^alpha as q -> 1
        alpha = 0.5
        U = sample_opclayton(10_000_000, 2, alpha, SeedSpec(14))
        q = 0.999
        chi = np.mean((U[:, 0] > q) & (U[:, 1] > q)) / (1.0 - q)
        assert abs(chi - (2.0 - 2.0**alpha)) < 0.05


class TestTruncatedTMargins:
    def test_atom_below_half(self):
        assert apply_truncated_t_margins(np.array([0.3]))[0] == 0.0
        assert apply_truncated_t_margins(np.array([0.5]))[0] == 0.0

    def test_positive_half_median(self):
        got = apply_truncated_t_margins(np.array([0.75]))[0]
        # oracle: t(5) quantile via inverse incomplete beta
        # T5(y) = 0.75  <=>  I_{5/(5+y^2)}(5/2, 1/2) = 0.5
        y = math.sqrt(5.0 / special.betaincinv(2.5, 0.5, 0.5) - 5.0)
        assert_allclose(got, y, rtol=1e-10)
        assert_allclose(got, 0.7267, atol=2e-4)

    def test_rejects_boundary_uniforms(self):
        with pytest.raises(UsageError):
            apply_truncated_t_margins(np.array([0.0, 0.5]))

    def test_study_data_zero_mass(self):
        Y = sample_study_data(50_000, 2, 0.5, SeedSpec(15))
        assert abs(np.mean(Y == 0.0) - 0.5) < 0.01
        assert np.all(Y >= 0.0)
