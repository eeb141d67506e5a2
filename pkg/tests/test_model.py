"""Exponent functions, their derivatives, and partition combinatorics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate

from mevlab.errors import CapabilityError, UsageError
from mevlab.model import (
    AsymLogisticParams,
    BELL_NUMBERS,
    LogisticParams,
    SetPartition,
    alpha_derivs_bivariate,
    coarsen_by_one,
    enumerate_partitions,
    ev_density_logistic,
    exponent_asym_logistic,
    exponent_logistic,
    partial_deriv_asym_logistic,
    partial_deriv_logistic,
    partition_sum_coefficients,
)

positive = st.floats(min_value=0.05, max_value=50.0)
alphas = st.floats(min_value=0.05, max_value=1.0)


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def mixed_partial_fd(f, z, coords, rel_step=1e-2):
    """Mixed partial of f at z by nested fourth-order central differences.

    Fourth-order stencils keep the truncation error ~h^4 while the step stays
    large enough that round-off does not blow up for third/fourth mixed
    derivatives.
    """
    coords = list(coords)
    if not coords:
        return f(z)
    d, rest = coords[0], coords[1:]
    h = rel_step * z[d]
    acc = 0.0
    for w, m in ((1.0, -2), (-8.0, -1), (8.0, 1), (-1.0, 2)):
        z2 = np.array(z, dtype=float)
        z2[d] += m * h
        acc += w * mixed_partial_fd(f, z2, rest, rel_step)
    return acc / (12.0 * h)


class TestExponentLogistic:
    def test_independence_unit_point(self):
        assert_allclose(exponent_logistic([1.0, 1.0], LogisticParams(1.0)), 2.0)

    def test_unit_point_closed_form(self):
        assert_allclose(
            exponent_logistic([1.0, 1.0], LogisticParams(0.5)), math.sqrt(2.0),
            rtol=1e-14,
        )

    def test_homogeneity_at_two(self):
        # V(2z) = V(z)/2
        assert_allclose(
            exponent_logistic([2.0, 2.0], LogisticParams(0.5)),
            math.sqrt(2.0) / 2.0, rtol=1e-14,
        )

    def test_rejects_nonpositive(self):
        with pytest.raises(UsageError):
            exponent_logistic([1.0, 0.0], LogisticParams(0.5))

    def test_rejects_bad_alpha(self):
        for bad in (0.0, -0.2, 1.2, float("nan")):
            with pytest.raises(UsageError):
                LogisticParams(bad)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(positive, min_size=2, max_size=6), alphas,
           st.floats(min_value=0.01, max_value=100.0))
    def test_homogeneity(self, z, alpha, s):
        p = LogisticParams(alpha)
        lhs = exponent_logistic(np.asarray(z) * s, p)
        rhs = exponent_logistic(z, p) / s
        assert_allclose(lhs, rhs, rtol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(positive, min_size=2, max_size=6), alphas)
    def test_bounds(self, z, alpha):
        z = np.asarray(z)
        V = exponent_logistic(z, LogisticParams(alpha))
        assert np.max(1.0 / z) <= V * (1 + 1e-12)
        assert V <= np.sum(1.0 / z) * (1 + 1e-12)

    def test_marginal_constraint(self):
        # all other coordinates pushed to 1e12 leaves 1/z_d
        z = np.array([1e12, 3.7, 1e12])
        V = exponent_logistic(z, LogisticParams(0.4))
        assert_allclose(V, 1 / 3.7, rtol=1e-10)


class TestPartialDerivLogistic:
    def test_independence_single(self):
        got = partial_deriv_logistic([2.0, 4.0], LogisticParams(1.0), {0})
        assert_allclose(got, -0.25, rtol=1e-14)

    def test_independence_mixed_vanishes(self):
        got = partial_deriv_logistic([2.0, 4.0], LogisticParams(1.0), {0, 1})
        assert got == 0.0

    def test_bivariate_closed_form(self):
        got = partial_deriv_logistic([1.0, 1.0], LogisticParams(0.5), {0, 1})
        assert_allclose(got, -(2.0 ** -1.5), rtol=1e-13)

    def test_empty_set_rejected(self):
        with pytest.raises(UsageError):
            partial_deriv_logistic([1.0, 1.0], LogisticParams(0.5), set())

    @settings(max_examples=40, deadline=None)
    @given(
        # well-scaled points: far from the regime where |V_E| << |V| makes
        # any finite-difference oracle drown in roundoff
        st.lists(st.floats(min_value=0.4, max_value=3.0), min_size=2, max_size=4),
        st.floats(min_value=0.2, max_value=0.95),
        st.data(),
    )
    def test_matches_finite_differences(self, z, alpha, data):
        z = np.asarray(z)
        D = z.size
        k = data.draw(st.integers(min_value=1, max_value=min(D, 3)))
        E = sorted(data.draw(st.permutations(range(D)))[:k])
        p = LogisticParams(alpha)
        got = partial_deriv_logistic(z, p, E)
        # power-law derivatives grow like z^(-1/alpha-k), so the safe step
        # shrinks with alpha
        step = 2.5e-3 * min(1.0, alpha / 0.25)
        ref = mixed_partial_fd(lambda zz: exponent_logistic(zz, p), z, E,
                               rel_step=step)
        assert_allclose(got, ref, rtol=5e-6, atol=1e-12)


class TestDensity:
    def test_independence_unit_point(self):
        got = ev_density_logistic([1.0, 1.0], LogisticParams(1.0))
        assert_allclose(got, math.exp(-2.0), rtol=1e-13)

    def test_two_partition_expansion(self):
        z = np.array([0.7, 2.3])
        p = LogisticParams(0.4)
        V = exponent_logistic(z, p)
        V1 = partial_deriv_logistic(z, p, {0})
        V2 = partial_deriv_logistic(z, p, {1})
        V12 = partial_deriv_logistic(z, p, {0, 1})
        assert_allclose(
            ev_density_logistic(z, p), (V1 * V2 - V12) * math.exp(-V), rtol=1e-12
        )

    def test_partition_sum_matches_enumeration(self):
        # oracle: explicit enumeration of all partitions with explicit V_E products
        rng = np.random.default_rng(5)
        for D in (3, 4, 5):
            z = rng.uniform(0.4, 4.0, size=D)
            p = LogisticParams(0.63)
            direct = 0.0
            for part in enumerate_partitions(D):
                term = 1.0
                for block in part.blocks:
                    term *= -partial_deriv_logistic(z, p, block)
                direct += term
            direct *= math.exp(-exponent_logistic(z, p))
            assert_allclose(ev_density_logistic(z, p), direct, rtol=1e-11)

    def test_matches_mixed_finite_difference_of_cdf(self):
        # D=3 oracle: third mixed derivative of the joint cdf exp(-V)
        z = np.array([1.0, 2.0, 3.0])
        p = LogisticParams(0.7)
        fd = mixed_partial_fd(
            lambda zz: math.exp(-exponent_logistic(zz, p)), z, [0, 1, 2]
        )
        assert_allclose(ev_density_logistic(z, p), fd, rtol=1e-5)

    def test_density_normalizes(self):
        # substitute z = v/(1-v) on each axis and integrate over the unit square
        p = LogisticParams(0.55)

        def integrand(v1, v2):
            z = np.array([v1 / (1 - v1), v2 / (1 - v2)])
            jac = 1.0 / ((1 - v1) ** 2 * (1 - v2) ** 2)
            return ev_density_logistic(z, p) * jac

        total, _ = integrate.dblquad(
            integrand, 1e-9, 1 - 1e-9, 1e-9, 1 - 1e-9, epsabs=1e-6, epsrel=1e-6
        )
        assert abs(total - 1.0) < 1e-3

    def test_guard_beyond_enumeration_limit(self):
        with pytest.raises(CapabilityError, match="Bell"):
            ev_density_logistic(np.ones(13), LogisticParams(0.5))


class TestAlphaDerivs:
    def test_unit_point_values(self):
        d = alpha_derivs_bivariate([1.0, 1.0], LogisticParams(1.0))
        assert_allclose([d.V, d.V1, d.V2, d.V12], [2.0, -1.0, -1.0, 0.0], atol=1e-14)

    def test_unit_point_alpha_derivative(self):
        # V(1,1) = 2^alpha so dV/dalpha = 2^alpha log 2
        for alpha in (0.3, 0.8, 1.0):
            d = alpha_derivs_bivariate([1.0, 1.0], LogisticParams(alpha))
            assert_allclose(d.Va, 2**alpha * math.log(2.0), rtol=1e-12)

    @pytest.mark.parametrize("z", [(1.0, 2.0), (0.4, 0.9), (19.5, 31.0)])
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
    def test_alpha_derivatives_match_finite_differences(self, z, alpha):
        h = 1e-5
        p = lambda a: alpha_derivs_bivariate(z, LogisticParams(a))
        d = p(alpha)
        for field, lower in (("Va", "V"), ("V1a", "V1"), ("V2a", "V2"), ("V12a", "V12")):
            fd = central_diff(lambda a: getattr(p(a), lower), alpha, h)
            assert_allclose(getattr(d, field), fd, rtol=1e-5, atol=1e-9)
        fd2 = (p(alpha + h).Va - p(alpha - h).Va) / (2 * h)
        assert_allclose(d.Vaa, fd2, rtol=1e-5, atol=1e-9)

    def test_coordinate_derivatives_match_dedicated_op(self):
        z = np.array([0.8, 5.0])
        p = LogisticParams(0.37)
        d = alpha_derivs_bivariate(z, p)
        assert_allclose(d.V1, partial_deriv_logistic(z, p, {0}), rtol=1e-13)
        assert_allclose(d.V2, partial_deriv_logistic(z, p, {1}), rtol=1e-13)
        assert_allclose(d.V12, partial_deriv_logistic(z, p, {0, 1}), rtol=1e-13)


class TestPartitions:
    def test_counts_are_bell_numbers(self):
        for D in range(1, 9):
            assert len(enumerate_partitions(D)) == BELL_NUMBERS[D]

    def test_unique_and_canonical(self):
        parts = enumerate_partitions(4)
        assert len(set(parts)) == len(parts)
        for p in parts:
            mins = [b[0] for b in p.blocks]
            assert mins == sorted(mins)
            assert p.dim == 4

    def test_out_of_range(self):
        with pytest.raises(UsageError):
            enumerate_partitions(0)
        with pytest.raises(UsageError):
            enumerate_partitions(13)

    def test_coarsen_three_singletons(self):
        p = SetPartition(((0,), (1,), (2,)))
        merged = coarsen_by_one(p)
        assert len(merged) == 3
        assert SetPartition(((0, 1), (2,))) in merged

    def test_coarsen_single_block(self):
        assert coarsen_by_one(SetPartition(((0, 1),))) == []

    def test_coarsen_enumeration(self):
        p = SetPartition(((0,), (1, 2), (3,)))
        got = set(coarsen_by_one(p))
        want = {
            SetPartition(((0, 1, 2), (3,))),
            SetPartition(((0, 3), (1, 2))),
            SetPartition(((0,), (1, 2, 3))),
        }
        assert got == want

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=6), st.data())
    def test_coarsen_count(self, D, data):
        parts = enumerate_partitions(D)
        p = data.draw(st.sampled_from(parts))
        assert len(coarsen_by_one(p)) == len(p) * (len(p) - 1) // 2

    def test_partition_sum_coefficients_match_enumeration(self):
        from mevlab.model import block_size_coefficients

        alpha = 0.42
        for k in (2, 3, 4, 5):
            a = block_size_coefficients(alpha, k)
            B = partition_sum_coefficients(alpha, k)
            direct = np.zeros(k)
            for part in enumerate_partitions(k):
                term = np.prod([a[len(b) - 1] for b in part.blocks])
                direct[len(part) - 1] += term
            assert_allclose(B, direct, rtol=1e-12)


class TestAsymmetricLogistic:
    def test_reduces_to_logistic(self):
        p = AsymLogisticParams.logistic_embedding(2, 0.5)
        got = exponent_asym_logistic([1.0, 1.0], p)
        want = exponent_logistic([1.0, 1.0], LogisticParams(0.5))
        assert got == want  # identical evaluation path after reduction

    def test_reduction_matches_on_grid(self):
        rng = np.random.default_rng(11)
        p = AsymLogisticParams.logistic_embedding(3, 0.3)
        for _ in range(25):
            z = rng.uniform(0.2, 6.0, size=3)
            assert_allclose(
                exponent_asym_logistic(z, p),
                exponent_logistic(z, LogisticParams(0.3)),
                rtol=1e-14,
            )

    def test_complete_independence(self):
        p = AsymLogisticParams(
            2, {}, {(frozenset({0}), 0): 1.0, (frozenset({1}), 1): 1.0}
        )
        assert_allclose(exponent_asym_logistic([1.0, 1.0], p), 2.0)
        assert p.has_boundary_mass()

    def test_mixed_mass_value(self):
        both = frozenset({0, 1})
        p = AsymLogisticParams(
            2,
            {both: 0.5},
            {
                (both, 0): 0.5,
                (both, 1): 0.5,
                (frozenset({0}), 0): 0.5,
                (frozenset({1}), 1): 0.5,
            },
        )
        got = exponent_asym_logistic([1.0, 1.0], p)
        assert_allclose(got, 1.0 + 0.5 * math.sqrt(2.0), rtol=1e-12)

    def test_weight_sum_enforced(self):
        both = frozenset({0, 1})
        with pytest.raises(UsageError):
            AsymLogisticParams(2, {both: 0.5}, {(both, 0): 0.9, (both, 1): 1.0})

    def test_marginal_constraint_with_mass(self):
        both = frozenset({0, 1})
        p = AsymLogisticParams(
            2,
            {both: 0.7},
            {
                (both, 0): 0.4,
                (both, 1): 0.6,
                (frozenset({0}), 0): 0.6,
                (frozenset({1}), 1): 0.4,
            },
        )
        V = exponent_asym_logistic([1e12, 2.5], p)
        assert_allclose(V, 1 / 2.5, rtol=1e-9)

    def test_partial_derivs_match_finite_differences(self):
        both = frozenset({0, 1, 2})
        pair = frozenset({0, 1})
        p = AsymLogisticParams(
            3,
            {both: 0.45, pair: 0.7},
            {
                (both, 0): 0.5, (both, 1): 0.3, (both, 2): 1.0,
                (pair, 0): 0.2, (pair, 1): 0.7,
                (frozenset({0}), 0): 0.3,
            },
        )
        z0 = np.array([1.3, 0.8, 2.1])
        for E in ({0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}):
            got = partial_deriv_asym_logistic(z0, p, E)
            ref = mixed_partial_fd(
                lambda zz: exponent_asym_logistic(zz, p), z0, sorted(E)
            )
            assert_allclose(got, ref, rtol=1e-6, atol=1e-11)
