"""Information-per-observation engine for the bivariate logistic estimators.

Censored-likelihood information is computed by quadrature from the four
censoring cells (none/left/right/both exceeding); the cross cell reduces to a
definite integral on [1/u, 2^alpha/u] after substituting v = V(u, y), and the
joint cell to a compactly-supported double integral after the pseudo-polar
substitution v1 = V(y1, y2), v2 = (y1 V)^(-1/alpha), under which the density
is e^(-v1) (alpha v1 + 1 - alpha).  Block-maximum information is a Monte
Carlo score variance under the exact limiting model, and the point-process
estimators are measured by replicated fitting.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import EstimationError, ThresholdTooLowError, UsageError
from .likelihoods import fit_estimator, select_threshold
from .model import LogisticParams, _bivariate_derivs_arrays
from .simulate import SeedSpec, sample_logistic_maxstable


@dataclass(frozen=True)
class InfoResult:
    """Information per raw observation for one estimator.

    `method` is "quadrature" or "monte-carlo"; Monte Carlo results carry a
    finite standard error for the information value.
    """

    info_per_obs: float
    method: str
    mc_stderr: float = 0.0

    def __post_init__(self):
        if not self.info_per_obs > 0:
            raise EstimationError("information must be positive")
        if self.method == "monte-carlo" and not math.isfinite(self.mc_stderr):
            raise EstimationError("Monte Carlo information needs a finite stderr")


def _score_richardson(ell, alpha, h=1e-5):
    """Fourth-order Richardson finite-difference score of a log likelihood."""
    h = min(h, 0.25 * (1.0 - alpha), 0.25 * alpha) if alpha < 1.0 else h
    return (
        8.0 * (ell(alpha + h) - ell(alpha - h))
        - (ell(alpha + 2 * h) - ell(alpha - 2 * h))
    ) / (12.0 * h)


def _var_with_stderr(x):
    v = float(np.var(x, ddof=1))
    m4 = float(np.mean((x - x.mean()) ** 4))
    return v, math.sqrt(max(m4 - v * v, 0.0) / x.size)


def _log_density_rows(z1, z2, alpha):
    l1, l2 = np.log(z1), np.log(z2)
    x1, x2 = np.exp(-l1 / alpha), np.exp(-l2 / alpha)
    s = x1 + x2
    core = s ** (2 * alpha - 2) + (1 - alpha) / alpha * s ** (alpha - 2)
    return np.log(core) - (1 / alpha + 1) * (l1 + l2) - s**alpha


def info_block_max(alpha, block_length, variant="max1", mc=100_000,
                   seed=SeedSpec(0)) -> InfoResult:
    """Block-maximum information per raw observation, MC score variance.

    Maxima are drawn from the exact limiting model (known margins), for the
    occurrence-time variants the partition is drawn given the maximum with
    probability proportional to its density factor, scores are fourth-order
    finite differences, and the per-maximum information is divided by the
    block length.  The bias-corrected variant has the same limit information
    as the occurrence-time one, so `max3` reports the `max2` value.
    """
    if variant not in ("max1", "max2", "max3"):
        raise UsageError("variant must be one of max1, max2, max3")
    if block_length < 1:
        raise UsageError("block length must be >= 1")
    rng = seed.rng() if isinstance(seed, SeedSpec) else SeedSpec(int(seed)).rng()
    Z = sample_logistic_maxstable(mc, 2, LogisticParams(alpha), rng)
    z1, z2 = Z[:, 0], Z[:, 1]
    if variant == "max1":
        def ell(a):
            return _log_density_rows(z1, z2, a)
    else:
        V, V1, V2, V12, *_ = _bivariate_derivs_arrays(z1, z2, alpha)
        p_joint = -V12 / (V1 * V2 - V12)
        joint = rng.uniform(size=mc) < p_joint

        def ell(a):
            V, V1, V2, V12, *_ = _bivariate_derivs_arrays(z1, z2, a)
            with np.errstate(divide="ignore"):
                terms = np.where(joint, np.log(-V12), np.log(V1 * V2))
            return terms - V

    score = _score_richardson(ell, alpha)
    v, se = _var_with_stderr(score)
    return InfoResult(v / block_length, "monte-carlo", se / block_length)


# ---------------------------------------------------------------------------
# censored-likelihood information by quadrature
# ---------------------------------------------------------------------------

def _cell_scores(y1, y2, alpha, variant):
    """Scores of the single- and joint-exceedance censored contributions."""
    V, V1, V2, V12, Va, Vaa, V1a, V2a, V12a = _bivariate_derivs_arrays(
        y1, y2, alpha
    )
    if variant == "thr4":
        s01 = V2a / V2 - Va
        s11 = (V1a * V2 + V1 * V2a - V12a) / (V1 * V2 - V12) - Va
    else:
        s01 = V2a / V2
        s11 = V12a / V12
    return s01, s11


def _tail_cell_hessians(y1, y2, alpha):
    """Second dependence-parameter derivatives of the tail-form cell logs.

    With s = y1^(-1/a) + y2^(-1/a), r1 = (d s/d a)/s and r2 = (d2 s/d a2)/s:
      d2 log(-V_2)  = 2 r1 + (a-1)(r2 - r1^2) - 2 log(y2)/a^3
      d2 log(-V_12) = (1-2a)/(a(1-a))^2 + 2 r1 + (a-2)(r2 - r1^2)
                      - 2 (log y1 + log y2)/a^3
    """
    l1, l2 = math.log(y1), math.log(y2)
    ra = 1.0 / alpha
    x1, x2 = math.exp(-l1 * ra), math.exp(-l2 * ra)
    s = x1 + x2
    r1 = (x1 * l1 + x2 * l2) * ra * ra / s
    r2 = (x1 * l1 * (l1 * ra - 2.0) + x2 * l2 * (l2 * ra - 2.0)) * ra**3 / s
    curve = r2 - r1 * r1
    h01 = 2.0 * r1 + (alpha - 1.0) * curve - 2.0 * l2 * ra**3
    h11 = (
        (1.0 - 2.0 * alpha) / (alpha * (1.0 - alpha)) ** 2
        + 2.0 * r1 + (alpha - 2.0) * curve - 2.0 * (l1 + l2) * ra**3
    )
    return h01, h11


def _printed_cross_cell_bracket(v, alpha, u):
    """Squared-bracket integrand of the published cross-cell reduction.

    Kept for the finiteness check on the open interval; the value it
    integrates to does not agree with the defining cell decomposition (see
    the direct score form used below), so it is not used for information
    numbers.
    """
    t1 = (1 - v) * v ** (1 / alpha) * (np.log(u) + np.log(v))
    t2 = (
        1 + alpha * (1 - v) * (v ** (1 / alpha) - u ** (-1 / alpha))
    ) * np.log(-1 + (u * v) ** (1 / alpha))
    return np.exp(-v) / alpha**2 * (t1 - t2) ** 2


def _y_from_v(v, alpha, u):
    """Inverse of v = V(u, y) on the cross cell: y = (v^(1/a) - u^(-1/a))^(-a)."""
    return (v ** (1 / alpha) - u ** (-1 / alpha)) ** -alpha


def _four_cell_quadrature(alpha, u, cell00, cell01, cell11, epsabs):
    """Expectation of per-cell functions under the true max-stable model.

    cell00 is a number (weighting G(u, u)); cell01/cell11 map points of the
    single/joint exceedance cells; the cross cell integrates on
    v = V(u, y) in [1/u, 2^alpha/u] and the joint cell in the pseudo-polar
    coordinates, where the density is e^(-v1)(alpha v1 + 1 - alpha).
    """
    V_uu = float(_bivariate_derivs_arrays(u, u, alpha)[0])
    total = cell00 * math.exp(-V_uu)
    lo, hi = 1.0 / u, 2.0**alpha / u

    def cross_integrand(v):
        return cell01(u, _y_from_v(v, alpha, u)) * math.exp(-v)

    cross, _err = integrate.quad(
        cross_integrand, lo, hi, epsabs=epsabs, epsrel=1e-10, limit=300
    )
    total += 2.0 * cross

    def joint_inner(v1):
        b = (u * v1) ** (-1.0 / alpha)
        lob, hib = max(0.0, 1.0 - b), min(1.0, b)
        if hib <= lob:
            return 0.0

        def f(v2):
            return cell11(v2**-alpha / v1, (1.0 - v2) ** -alpha / v1)

        val, _e = integrate.quad(f, lob, hib, epsabs=epsabs, epsrel=1e-9,
                                 limit=200)
        return val * math.exp(-v1) * (alpha * v1 + 1.0 - alpha)

    joint, _err = integrate.quad(
        joint_inner, 0.0, hi, epsabs=epsabs, epsrel=1e-9, limit=300
    )
    return total + joint


def info_censored(alpha, p, variant="thr4", epsabs=1e-8) -> InfoResult:
    """Censored-likelihood information per observation at threshold quantile p.

    Four-cell decomposition with the marginal threshold u = -1/log(p) on the
    Frechet scale.  The max-stable form `thr4` is an exact likelihood under
    the limiting model, so its information is the score variance (computed
    with the Bartlett boundary terms).  The first-order form `thr5` is a
    misspecified objective at any finite threshold; its reported information
    is the Godambe value H^2/J (H the expected negative Hessian, J the raw
    second moment of the score), which is what controls the estimator's
    asymptotic variance and tends to the `thr4` value as p -> 1.  `thr5`
    requires V(u, u) < 1.
    """
    if not 0.0 < p < 1.0:
        raise UsageError("threshold probability must be in (0, 1)")
    if variant not in ("thr4", "thr5"):
        raise UsageError("variant must be thr4 or thr5")
    if not 0.0 < alpha < 1.0:
        raise UsageError("information is computed in the interior 0 < alpha < 1")
    u = -1.0 / math.log(p)
    V, V1, V2, V12, Va, Vaa, V1a, V2a, V12a = (
        float(x) for x in _bivariate_derivs_arrays(u, u, alpha)
    )
    G_uu = math.exp(-V)

    if variant == "thr4":
        boundary = (Va**2 - Vaa) * G_uu
        total = _four_cell_quadrature(
            alpha, u,
            Vaa,
            lambda y1, y2: _cell_scores(y1, y2, alpha, "thr4")[0] ** 2,
            lambda y1, y2: _cell_scores(y1, y2, alpha, "thr4")[1] ** 2,
            epsabs,
        )
        # Bartlett boundary terms: +(Va^2 - Vaa) G for the two cross cells,
        # -(Va^2 - Vaa) G for the joint cell
        return InfoResult(total + boundary, "quadrature")

    if V >= 1.0:
        raise ThresholdTooLowError(f"tail form needs V(u, u) < 1, got {V:.4f}")

    def tail_pieces(a):
        vals = _bivariate_derivs_arrays(u, u, a)
        return float(vals[0]), float(vals[4]), float(vals[5])

    def mean_score(a):
        # expectation over the true model at `alpha`; only the objective
        # parameter moves
        Vu, Vau, _ = tail_pieces(a)
        return _four_cell_quadrature(
            alpha, u,
            -Vau / (1.0 - Vu),
            lambda y1, y2: _cell_scores(y1, y2, a, "thr5")[0],
            lambda y1, y2: _cell_scores(y1, y2, a, "thr5")[1],
            epsabs,
        )

    # the fixed-threshold tail objective peaks at a pseudo-true value; the
    # estimator's precision is the sandwich H^2/J there
    from scipy.optimize import brentq

    lo_a, hi_a = 0.02, min(0.998, alpha + 0.2 * (1 - alpha) + 0.05)
    m_lo, m_hi = mean_score(max(lo_a, alpha - 0.2)), mean_score(hi_a)
    a_lo = max(lo_a, alpha - 0.2)
    if m_lo * m_hi > 0:
        a_lo, hi_a = lo_a, 0.998
    alpha_star = brentq(mean_score, a_lo, hi_a, xtol=1e-8)

    Vu, Vau, Vaau = tail_pieces(alpha_star)
    score00 = -Vau / (1.0 - Vu)
    hess00 = -(Vaau * (1.0 - Vu) + Vau**2) / (1.0 - Vu) ** 2
    J = _four_cell_quadrature(
        alpha, u,
        score00**2,
        lambda y1, y2: _cell_scores(y1, y2, alpha_star, "thr5")[0] ** 2,
        lambda y1, y2: _cell_scores(y1, y2, alpha_star, "thr5")[1] ** 2,
        epsabs,
    )
    H = -_four_cell_quadrature(
        alpha, u,
        hess00,
        lambda y1, y2: _tail_cell_hessians(y1, y2, alpha_star)[0],
        lambda y1, y2: _tail_cell_hessians(y1, y2, alpha_star)[1],
        epsabs,
    )
    return InfoResult(H * H / J, "quadrature")


def mc_censored_score_variance(alpha, p, variant="thr4", mc=100_000,
                               seed=SeedSpec(1)):
    """Monte Carlo score variance of the censored contribution (cross-check).

    Returns (variance, stderr, mean_score); the mean is near zero by the
    score identity when the tail form is exact.
    """
    rng = seed.rng() if isinstance(seed, SeedSpec) else SeedSpec(int(seed)).rng()
    u = -1.0 / math.log(p)
    Z = sample_logistic_maxstable(mc, 2, LogisticParams(alpha), rng)
    b1 = np.maximum(Z[:, 0], u)
    b2 = np.maximum(Z[:, 1], u)
    d1 = Z[:, 0] > u
    d2 = Z[:, 1] > u

    def ell(a):
        V, V1, V2, V12, *_ = _bivariate_derivs_arrays(b1, b2, a)
        if variant == "thr4":
            with np.errstate(divide="ignore"):
                both = np.log(V1 * V2 - V12)
                left = np.log(-V1)
                right = np.log(-V2)
            out = np.where(d1 & d2, both, np.where(d1, left, np.where(d2, right, 0.0)))
            return out - V
        with np.errstate(divide="ignore"):
            both = np.log(-V12)
            left = np.log(-V1)
            right = np.log(-V2)
            none = np.log1p(-V)
        return np.where(
            d1 & d2, both, np.where(d1, left, np.where(d2, right, none))
        )

    score = _score_richardson(ell, alpha)
    v, se = _var_with_stderr(score)
    return v, se, float(score.mean())


# ---------------------------------------------------------------------------
# point-process estimators by replicated fitting
# ---------------------------------------------------------------------------

def info_threshold_mc(alpha, p, variant, n=20_000, replicates=500,
                      seed=SeedSpec(2), fit_tol=1e-6) -> InfoResult:
    """Information per observation of thr1/thr2/thr3 from replicate fits.

    Each replicate draws n exact logistic rows with known margins, fits the
    requested objective, and the information is 1/(n Var(alpha-hat)); the
    stderr comes from the chi-square spread of the variance estimate.
    """
    if variant not in ("thr1", "thr2", "thr3"):
        raise UsageError("variant must be thr1, thr2 or thr3")
    if replicates < 10:
        raise UsageError("need at least 10 replicates")
    base = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    kind = "diagonal" if variant == "thr2" else "marginal"
    estimates = np.full(replicates, np.nan)
    failures = 0
    for r in range(replicates):
        stream = base.child(r)
        data = sample_logistic_maxstable(n, 2, LogisticParams(alpha), stream)
        try:
            td = select_threshold(p, kind, data, margins="known")
            res = fit_estimator(variant, td, tol=fit_tol)
            if not res.converged:
                raise EstimationError(res.diagnostics)
            estimates[r] = res.x
        except EstimationError:
            failures += 1
    if failures > 0.01 * replicates:
        raise EstimationError(
            f"{failures}/{replicates} replicate fits failed for {variant}"
        )
    ok = estimates[np.isfinite(estimates)]
    var = float(np.var(ok, ddof=1))
    info = 1.0 / (n * var)
    rel_se = math.sqrt(2.0 / (ok.size - 1))
    return InfoResult(info, "monte-carlo", info * rel_se)


# ---------------------------------------------------------------------------
# relative-efficiency table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AreConfig:
    """Scale knobs for the efficiency table."""

    estimators: tuple = ("max1", "max2", "thr1", "thr2", "thr4", "thr5")
    block_length: int = 100
    mc_scores: int = 100_000
    sim_n: int = 20_000
    sim_replicates: int = 500
    seed: int = 0


@dataclass(frozen=True)
class AreCell:
    estimator: str
    alpha: float
    tuning: str            # "L=100" or "p=0.95"
    root_are_percent: float
    method: str
    mc_stderr: float       # on the percent scale


def are_table(alphas, p_values, config: AreConfig = AreConfig()):
    """Root relative efficiencies (percent) against the censored estimator.

    Cell value is 100 sqrt(i_estimator / i_thr4) at the same threshold
    probability; block-maximum rows use the configured block length.
    """
    rows = []
    base = SeedSpec(config.seed)
    stream = 0
    for p in p_values:
        for alpha in alphas:
            ref = info_censored(alpha, p, "thr4").info_per_obs
            for est in config.estimators:
                if est.startswith("max"):
                    r = info_block_max(
                        alpha, config.block_length, est, config.mc_scores,
                        base.child(stream),
                    )
                    tuning = f"L={config.block_length}"
                elif est in ("thr4", "thr5"):
                    r = info_censored(alpha, p, est)
                    tuning = f"p={p:g}"
                else:
                    r = info_threshold_mc(
                        alpha, p, est, config.sim_n, config.sim_replicates,
                        base.child(10_000 + stream),
                    )
                    tuning = f"p={p:g}"
                stream += 1
                pct = 100.0 * math.sqrt(r.info_per_obs / ref)
                se_pct = (
                    pct * r.mc_stderr / (2.0 * r.info_per_obs)
                    if r.method == "monte-carlo" else 0.0
                )
                rows.append(AreCell(est, alpha, tuning, pct, r.method, se_pct))
    return rows
