"""Information quadratures, their MC cross-checks, and the efficiency table."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from mevlab.errors import ThresholdTooLowError, UsageError
from mevlab.fisher import (
    AreConfig,
    _printed_cross_cell_bracket,
    _y_from_v,
    are_table,
    info_block_max,
    info_censored,
    info_threshold_mc,
    mc_censored_score_variance,
)
from mevlab.model import _bivariate_derivs_arrays
from mevlab.simulate import SeedSpec


class TestCensoredQuadrature:
    def test_positive_on_grid(self):
        for alpha in (0.1, 0.5, 0.9):
            for p in (0.95, 0.99):
                assert info_censored(alpha, p, "thr4").info_per_obs > 0.0

    def test_cross_cell_matches_direct_y_integral(self):
        # same cell integrated in the raw coordinate as an oracle
        alpha, p = 0.62, 0.95
        u = -1.0 / math.log(p)

        def integrand(y):
            V, V1, V2, V12, Va, Vaa, V1a, V2a, V12a = _bivariate_derivs_arrays(
                u, y, alpha
            )
            return (V2a / V2 - Va) ** 2 * (-V2) * math.exp(-V)

        direct, _ = integrate.quad(
            lambda w: integrand(u / w) * u / w**2, 0, 1, epsabs=1e-11, limit=300
        )

        def vform(v):
            y = _y_from_v(v, alpha, u)
            V, V1, V2, V12, Va, Vaa, V1a, V2a, V12a = _bivariate_derivs_arrays(
                u, y, alpha
            )
            return (V2a / V2 - Va) ** 2 * math.exp(-v)

        got, _ = integrate.quad(vform, 1 / u, 2**alpha / u, epsabs=1e-11,
                                limit=300)
        assert_allclose(got, direct, rtol=1e-8)

    def test_agrees_with_mc_score_variance(self):
        alpha, p = 0.5, 0.95
        quad = info_censored(alpha, p, "thr4").info_per_obs
        var, se, mean = mc_censored_score_variance(alpha, p, "thr4", 100_000,
                                                   SeedSpec(5))
        assert abs(quad - var) < 3 * se
        assert abs(mean) < 3 * math.sqrt(var / 100_000)

    def test_tail_variant_close_at_high_threshold(self):
        for alpha in (0.3, 0.6):
            a = info_censored(alpha, 0.99, "thr4").info_per_obs
            b = info_censored(alpha, 0.99, "thr5").info_per_obs
            assert abs(a - b) < 0.02 * a

    def test_tail_variant_hessians_match_finite_differences(self):
        from mevlab.fisher import _cell_scores, _tail_cell_hessians

        h = 1e-5
        for (y1, y2, alpha) in ((30.0, 45.0, 0.55), (20.5, 25.0, 0.85)):
            got01, got11 = _tail_cell_hessians(y1, y2, alpha)
            fd01 = (_cell_scores(y1, y2, alpha + h, "thr5")[0]
                    - _cell_scores(y1, y2, alpha - h, "thr5")[0]) / (2 * h)
            fd11 = (_cell_scores(y1, y2, alpha + h, "thr5")[1]
                    - _cell_scores(y1, y2, alpha - h, "thr5")[1]) / (2 * h)
            assert_allclose(got01, fd01, rtol=1e-5)
            assert_allclose(got11, fd11, rtol=1e-5)

    @pytest.mark.slow
    def test_tail_variant_matches_replicated_fit_variance(self):
        # sandwich information at the pseudo-true value should predict the
        # actual spread of tail-form fits on exact data
        from mevlab.likelihoods import fit_estimator, select_threshold
        from mevlab.model import LogisticParams
        from mevlab.simulate import sample_logistic_maxstable

        alpha, p, n, R = 0.6, 0.95, 20_000, 240
        base = SeedSpec(99)
        fits = np.empty(R)
        for r in range(R):
            data = sample_logistic_maxstable(n, 2, LogisticParams(alpha),
                                             base.child(r))
            td = select_threshold(p, "marginal", data, margins="known")
            fits[r] = fit_estimator("thr5", td).x
        info_emp = 1.0 / (n * np.var(fits, ddof=1))
        quad = info_censored(alpha, p, "thr5").info_per_obs
        rel_se = math.sqrt(2.0 / (R - 1))
        assert abs(info_emp - quad) <= 3 * rel_se * quad

    def test_quadrature_stability_under_tolerance_halving(self):
        alpha, p = 0.4, 0.95
        a = info_censored(alpha, p, "thr4", epsabs=1e-8).info_per_obs
        b = info_censored(alpha, p, "thr4", epsabs=5e-9).info_per_obs
        assert abs(a - b) < 1e-6 * a

    def test_tail_threshold_requirement(self):
        with pytest.raises(ThresholdTooLowError):
            info_censored(0.9, 0.2, "thr5")

    def test_printed_bracket_finite_on_open_interval(self):
        # the published reduction stays finite strictly inside its interval
        for alpha, p in ((0.2, 0.95), (0.5, 0.95), (0.9, 0.99)):
            u = -1.0 / math.log(p)
            lo, hi = 1 / u, 2**alpha / u
            v = lo + (hi - lo) * (np.arange(1, 10_001) / 10_001.0)
            vals = _printed_cross_cell_bracket(v, alpha, u)
            assert np.all(np.isfinite(vals))


class TestBlockMaxInfo:
    def test_score_centered(self):
        # the score identity: mean score at the true value is zero within MC
        from mevlab.fisher import _log_density_rows, _score_richardson
        from mevlab.model import LogisticParams
        from mevlab.simulate import sample_logistic_maxstable

        Z = sample_logistic_maxstable(50_000, 2, LogisticParams(0.5),
                                      SeedSpec(7))
        score = _score_richardson(
            lambda a: _log_density_rows(Z[:, 0], Z[:, 1], a), 0.5
        )
        assert abs(score.mean()) < 3 * score.std() / math.sqrt(score.size)
        r = info_block_max(0.5, 100, "max1", 50_000, SeedSpec(7))
        assert r.method == "monte-carlo" and r.mc_stderr > 0.0

    def test_occurrence_info_dominates(self):
        # extra occurrence-time information can only help
        for alpha in (0.3, 0.6, 0.9):
            i1 = info_block_max(alpha, 100, "max1", 60_000, SeedSpec(8))
            i2 = info_block_max(alpha, 100, "max2", 60_000, SeedSpec(9))
            slack = 3 * math.hypot(i1.mc_stderr, i2.mc_stderr)
            assert i2.info_per_obs >= i1.info_per_obs - slack

    def test_variants_agree_under_strong_dependence(self):
        # partitions are almost surely joint, so the extra information vanishes
        i1 = info_block_max(0.05, 100, "max1", 60_000, SeedSpec(10))
        i2 = info_block_max(0.05, 100, "max2", 60_000, SeedSpec(11))
        slack = 3 * math.hypot(i1.mc_stderr, i2.mc_stderr)
        assert abs(i1.info_per_obs - i2.info_per_obs) <= slack

    def test_max3_reports_max2_value(self):
        a = info_block_max(0.4, 100, "max2", 20_000, SeedSpec(12))
        b = info_block_max(0.4, 100, "max3", 20_000, SeedSpec(12))
        assert_allclose(a.info_per_obs, b.info_per_obs)


class TestThresholdMcInfo:
    @pytest.mark.slow
    def test_count_information_ordering(self):
        # the marginal point process sees the exceedance count; conditioning
        # it away can only lose information
        i1 = info_threshold_mc(0.5, 0.95, "thr1", 10_000, 150, SeedSpec(13))
        i3 = info_threshold_mc(0.5, 0.95, "thr3", 10_000, 150, SeedSpec(13))
        slack = 3 * math.hypot(i1.mc_stderr, i3.mc_stderr)
        assert i1.info_per_obs >= i3.info_per_obs - slack

    def test_rejects_bad_variant(self):
        with pytest.raises(UsageError):
            info_threshold_mc(0.5, 0.95, "thr4")


class TestAreTable:
    def test_reference_is_hundred(self):
        rows = are_table(
            [0.5], [0.95],
            AreConfig(estimators=("thr4",), mc_scores=1000),
        )
        assert len(rows) == 1
        assert rows[0].root_are_percent == 100.0
        assert rows[0].mc_stderr == 0.0

    def test_anchor_cells_quick(self):
        # desk-scale sanity at modest mc; the acceptance suite runs the full
        # tolerance version
        rows = are_table(
            [0.1, 0.9], [0.95],
            AreConfig(estimators=("max1",), mc_scores=40_000, seed=3),
        )
        by_alpha = {r.alpha: r for r in rows}
        assert abs(by_alpha[0.1].root_are_percent - 42.6) < 2.0
        assert 15.0 < by_alpha[0.9].root_are_percent < 30.0
