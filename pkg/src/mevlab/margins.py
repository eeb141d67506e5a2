"""Marginal models and transformations to the unit Frechet scale.

Dependence fitting happens on a common scale: every margin is mapped through
its (known or estimated) distribution function F and then z = -1/log F, which
is standard unit Frechet when F is correct.  Three per-component variants are
supported: an exactly known unit Frechet margin, a fitted GEV (block maxima),
and a semi-parametric composite that is empirical below a high threshold and
a fitted generalized Pareto tail above it.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import EstimationError, UsageError
from .optimize import maximize_simplex

# below this |shape| the Gumbel/exponential limit forms are used
_SHAPE_EPS = 1e-6


@dataclass(frozen=True)
class GevParams:
    loc: float
    scale: float
    shape: float

    def __post_init__(self):
        if not self.scale > 0:
            raise UsageError("GEV scale must be positive")


@dataclass(frozen=True)
class GpdParams:
    loc: float
    scale: float
    shape: float

    def __post_init__(self):
        if not self.scale > 0:
            raise UsageError("GPD scale must be positive")


def gev_transform(z, params: GevParams, effective_n=1):
    """Map values through the GEV core to the (scaled) unit Frechet scale.

    Returns (t, log_jacobian) with t = n * (1 + shape*(z-loc)/scale)_+^(1/shape)
    and log_jacobian = log dt/dz; outside the support t = 0 and the Jacobian
    is -inf.  `effective_n` rescales a per-block transform to the raw
    observation scale (location/scale adjustment absorbed into the prefactor).
    """
    if effective_n < 1:
        raise UsageError("effective_n must be a positive integer")
    z = np.asarray(z, dtype=float)
    w = (z - params.loc) / params.scale
    xi = params.shape
    n = float(effective_n)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if abs(xi) < _SHAPE_EPS:
            t = n * np.exp(w)
            logjac = np.log(t / params.scale)
        else:
            base = 1.0 + xi * w
            inside = base > 0.0
            base = np.where(inside, base, 1.0)
            t = np.where(inside, n * base ** (1.0 / xi), 0.0)
            logjac = np.where(
                inside,
                np.log(n / params.scale) + (1.0 / xi - 1.0) * np.log(base),
                -np.inf,
            )
    return t, logjac


def gev_neg_loglik(params, sample):
    """Negative GEV log-likelihood; +inf outside the support."""
    loc, scale, xi = params
    if scale <= 0:
        return math.inf
    w = (np.asarray(sample) - loc) / scale
    n = w.size
    if abs(xi) < _SHAPE_EPS:
        return n * math.log(scale) + float(np.sum(w + np.exp(-w)))
    base = 1.0 + xi * w
    if np.any(base <= 0):
        return math.inf
    logb = np.log(base)
    return n * math.log(scale) + float(
        np.sum((1.0 + 1.0 / xi) * logb + np.exp(-logb / xi))
    )


def gpd_neg_loglik(params, excesses):
    """Negative GPD log-likelihood for excesses above the threshold."""
    scale, xi = params
    if scale <= 0:
        return math.inf
    w = np.asarray(excesses) / scale
    n = w.size
    if abs(xi) < _SHAPE_EPS:
        return n * math.log(scale) + float(np.sum(w))
    base = 1.0 + xi * w
    if np.any(base <= 0):
        return math.inf
    return n * math.log(scale) + (1.0 + 1.0 / xi) * float(np.sum(np.log(base)))


def _gev_score(params, sample):
    """Gradient of the negative GEV log-likelihood (smooth-shape branch)."""
    loc, scale, xi = params
    y = np.asarray(sample, dtype=float)
    w = (y - loc) / scale
    n = w.size
    if abs(xi) < _SHAPE_EPS:
        e = np.exp(-w)
        d_loc = np.sum(e - 1.0) / scale
        d_scale = (n - np.sum(w) + np.sum(w * e)) / scale
        return np.array([d_loc, d_scale, 0.0])  # shape frozen on the limit branch
    with np.errstate(invalid="ignore", divide="ignore"):
        # out-of-support probes yield nan scores; the polish loop stops there
        t = 1.0 + xi * w
        u = t ** (-1.0 / xi)
        logt = np.log(t)
        d_loc = (-(1.0 + xi) * np.sum(1.0 / t) + np.sum(u / t)) / scale
        d_scale = (n - (1.0 + xi) * np.sum(w / t) + np.sum(u * w / t)) / scale
        d_xi = np.sum(
            -logt / xi**2 + (1.0 + 1.0 / xi) * w / t
            + u * (logt / xi**2 - w / (xi * t))
        )
    return np.array([d_loc, d_scale, d_xi])


def _gpd_score(params, excesses):
    """Gradient of the negative GPD log-likelihood (smooth-shape branch)."""
    scale, xi = params
    x = np.asarray(excesses, dtype=float)
    n = x.size
    if abs(xi) < _SHAPE_EPS:
        return np.array([n / scale - np.sum(x) / scale**2, 0.0])
    with np.errstate(invalid="ignore", divide="ignore"):
        t = 1.0 + xi * x / scale
        d_scale = n / scale - (1.0 + xi) / scale**2 * np.sum(x / t)
        d_xi = (-np.sum(np.log(t)) / xi**2
                + (1.0 + 1.0 / xi) / scale * np.sum(x / t))
    return np.array([d_scale, d_xi])


def _newton_polish(x, nll, score, max_steps=8):
    """Damped Newton refinement on an analytic score.

    The simplex search stalls on the eps*|loglik| value plateau; a few Newton
    steps on the exact gradient push the argmin to near machine precision,
    which is what makes the fits location/scale equivariant to ~1e-10.
    """
    x = np.array(x, dtype=float)
    fx = nll(x)
    for _ in range(max_steps):
        g = score(x)
        if not np.all(np.isfinite(g)):
            break
        # finite-difference Jacobian of the analytic gradient
        n = x.size
        H = np.empty((n, n))
        for i in range(n):
            h = 1e-6 * max(abs(x[i]), 1e-3)
            xp = x.copy()
            xp[i] += h
            xm = x.copy()
            xm[i] -= h
            gp, gm = score(xp), score(xm)
            if not (np.all(np.isfinite(gp)) and np.all(np.isfinite(gm))):
                return x
            H[:, i] = (gp - gm) / (2.0 * h)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        lam = 1.0
        improved = False
        for _ in range(6):
            xn = x - lam * step
            fn = nll(xn)
            if np.isfinite(fn) and fn <= fx + 1e-12:
                x, fx = xn, fn
                improved = True
                break
            lam *= 0.5
        if not improved or np.max(np.abs(lam * step)) < 1e-13:
            break
    return x


def _sample_lmoments(x):
    """First two sample L-moments and the L-skewness ratio."""
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    i = np.arange(1, n + 1)
    b0 = x.mean()
    b1 = np.sum((i - 1) / (n - 1) * x) / n
    b2 = np.sum((i - 1) * (i - 2) / ((n - 1) * (n - 2)) * x) / n
    l1 = b0
    l2 = 2 * b1 - b0
    l3 = 6 * b2 - 6 * b1 + b0
    return l1, l2, (l3 / l2 if l2 > 0 else 0.0)


def gev_pwm_start(sample):
    """Probability-weighted-moment starting values (Hosking's approximation)."""
    l1, l2, t3 = _sample_lmoments(sample)
    c = 2.0 / (3.0 + t3) - math.log(2.0) / math.log(3.0)
    k = 7.8590 * c + 2.9554 * c * c
    if abs(k) < 1e-8:
        scale = l2 / math.log(2.0)
        loc = l1 - scale * 0.5772156649015329
        return GevParams(loc, max(scale, 1e-8), 0.0)
    gamma1k = math.exp(gammaln(1.0 + k))
    scale = l2 * k / ((1.0 - 2.0 ** (-k)) * gamma1k)
    loc = l1 - scale * (1.0 - gamma1k) / k
    return GevParams(loc, max(scale, 1e-8), -k)


def gpd_pwm_start(excesses):
    """Probability-weighted-moment starting values for the GPD."""
    l1, l2, _ = _sample_lmoments(excesses)
    if l2 <= 0:
        return max(l1, 1e-8), 0.0
    shape = 2.0 - l1 / l2
    scale = l1 * (l1 / l2 - 1.0)
    if scale <= 0:
        return max(l1, 1e-8), 0.0
    return scale, shape


# deterministic multiplicative jitters applied to the PWM start; restarts keep
# the fit equivariant under location/scale changes of the data
_RESTART_JITTERS = ((1.0, 1.0, 0.0), (0.9, 1.15, 0.1), (1.1, 0.85, -0.1))


def fit_gev(maxima, tol=1e-9) -> GevParams:
    """Maximum-likelihood GEV fit started at probability-weighted moments.

    The sample is standardized internally, so the fit is location/scale
    equivariant down to data-rounding precision rather than the sqrt(eps)
    floor of value-based optimization.
    """
    maxima = np.asarray(maxima, dtype=float)
    if maxima.size < 20:
        raise UsageError("need at least 20 block maxima")
    mu = float(np.mean(maxima))
    sd = float(np.std(maxima))
    if sd <= 0:
        raise EstimationError("degenerate sample (zero variance)")
    w = (maxima - mu) / sd
    start = gev_pwm_start(w)
    best = None
    for mloc, mscale, dshape in _RESTART_JITTERS:
        x0 = np.array([
            start.loc + (mloc - 1.0) * start.scale,
            start.scale * mscale,
            start.shape + dshape,
        ])
        if gev_neg_loglik(x0, w) == math.inf:
            continue
        r = maximize_simplex(
            lambda p: -gev_neg_loglik(p, w), x0,
            scale=np.array([0.1 * start.scale, 0.1 * start.scale, 0.1]),
            tol=tol, maxiter=10_000,
        )
        if best is None or r.value > best.value:
            best = r
    if best is None or not np.isfinite(best.value):
        raise EstimationError("GEV fit failed from all starting points")
    start_val = -gev_neg_loglik([start.loc, start.scale, start.shape], w)
    if np.isfinite(start_val) and best.value < start_val - 1e-6:
        raise EstimationError(
            f"GEV optimizer ended below its starting value "
            f"({best.value:.6g} < {start_val:.6g})"
        )
    loc, scale, shape = _newton_polish(
        best.argmax, lambda p: gev_neg_loglik(p, w), lambda p: _gev_score(p, w)
    )
    return GevParams(mu + sd * float(loc), sd * float(scale), float(shape))


def fit_gpd(exceedances, threshold, tol=1e-9) -> GpdParams:
    """Maximum-likelihood GPD fit to values above `threshold` (location pinned).

    Excesses are rescaled by their mean internally (scale equivariance down
    to data-rounding precision).
    """
    exceedances = np.asarray(exceedances, dtype=float)
    if exceedances.size < 20:
        raise UsageError("need at least 20 exceedances")
    if not np.all(exceedances > threshold):
        raise UsageError("all values must exceed the threshold")
    x = exceedances - threshold
    m = float(np.mean(x))
    w = x / m
    s0, xi0 = gpd_pwm_start(w)
    best = None
    for mscale, _unused, dshape in _RESTART_JITTERS:
        x0 = np.array([s0 * mscale, xi0 + dshape])
        if gpd_neg_loglik(x0, w) == math.inf:
            continue
        r = maximize_simplex(
            lambda p: -gpd_neg_loglik(p, w), x0,
            scale=np.array([0.1 * s0, 0.1]), tol=tol, maxiter=10_000,
        )
        if best is None or r.value > best.value:
            best = r
    if best is None or not np.isfinite(best.value):
        raise EstimationError("GPD fit failed from all starting points")
    scale, shape = _newton_polish(
        best.argmax, lambda p: gpd_neg_loglik(p, w), lambda p: _gpd_score(p, w)
    )
    return GpdParams(float(threshold), m * float(scale), float(shape))


# ---------------------------------------------------------------------------
# per-component margins
# ---------------------------------------------------------------------------

class KnownFrechetMargin:
    """Margin already on the unit Frechet scale."""

    smooth_everywhere = True

    def to_frechet(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0):
            raise UsageError("unit Frechet data must be positive")
        return y, np.zeros_like(y)

    def cdf(self, y):
        return np.exp(-1.0 / np.asarray(y, dtype=float))

    def frechet_threshold(self, p):
        return -1.0 / math.log(p)


class FittedGevMargin:
    """GEV margin for block maxima; t(y) is unit Frechet under the fit."""

    smooth_everywhere = True

    def __init__(self, params: GevParams, block_length=1):
        self.params = params
        self.block_length = int(block_length)

    def to_frechet(self, y):
        t, logjac = gev_transform(y, self.params)
        if np.any(t <= 0):
            raise EstimationError("value outside fitted GEV support")
        return t, logjac

    def cdf(self, y):
        t, _ = gev_transform(y, self.params)
        with np.errstate(divide="ignore"):
            return np.exp(-1.0 / t)


class SemiParametricMargin:
    """Empirical cdf below a high threshold, fitted GPD tail above it.

    The composite cdf is rank/(n+1) below the threshold and
    1 - zeta * (1 + shape*(y-u)/scale)^(-1/shape) above it, where zeta is the
    observed exceedance fraction, so the two pieces join continuously at u.
    The transform is smooth (has a Jacobian) only on the tail part.
    """

    smooth_everywhere = False

    def __init__(self, sample, threshold, gpd: GpdParams, zeta):
        self.sorted_sample = np.sort(np.asarray(sample, dtype=float))
        self.n = self.sorted_sample.size
        self.threshold = float(threshold)
        self.gpd = gpd
        self.zeta = float(zeta)

    @classmethod
    def fit(cls, sample, p, tol=1e-11):
        """Threshold at the ceil(p*n) order statistic, GPD fitted above it.

        The tail weight zeta uses the same rank/(n+1) convention as the
        empirical part, so the composite cdf is exactly continuous at u.
        """
        sample = np.asarray(sample, dtype=float)
        n = sample.size
        if not 0.0 < p < 1.0:
            raise UsageError("threshold probability must be in (0, 1)")
        srt = np.sort(sample)
        k = min(max(int(math.ceil(p * n)), 1), n - 1)
        u = srt[k - 1]
        exc = sample[sample > u]
        if exc.size < 10:
            raise EstimationError(
                f"only {exc.size} exceedances above the {p}-quantile threshold"
            )
        gpd = fit_gpd(exc, u, tol=tol)
        k_u = int(np.searchsorted(srt, u, side="right"))
        return cls(sample, u, gpd, 1.0 - k_u / (n + 1.0))

    def _tail_survivor(self, y):
        xi, tau = self.gpd.shape, self.gpd.scale
        w = (np.asarray(y, dtype=float) - self.threshold) / tau
        if abs(xi) < _SHAPE_EPS:
            return np.exp(-w)
        with np.errstate(divide="ignore"):
            # below-support values only arise where the empirical part is used
            return np.clip(1.0 + xi * w, 0.0, None) ** (-1.0 / xi)

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        below = y <= self.threshold
        ranks = np.searchsorted(self.sorted_sample, y, side="right")
        emp = ranks / (self.n + 1.0)
        tail = 1.0 - self.zeta * self._tail_survivor(y)
        return np.where(below, emp, tail)

    def to_frechet(self, y):
        y = np.asarray(y, dtype=float)
        F = self.cdf(y)
        if np.any(F <= 0.0) or np.any(F >= 1.0):
            raise EstimationError("cdf hit 0 or 1; cannot map to the Frechet scale")
        z = -1.0 / np.log(F)
        xi, tau = self.gpd.shape, self.gpd.scale
        above = y > self.threshold
        logjac = np.full(y.shape, np.nan)
        if np.any(above):
            ya = y[above]
            Fa = F[above]
            surv = self._tail_survivor(ya)
            # tail density zeta * surv^(1+shape) / scale
            logf = math.log(self.zeta) - math.log(tau) + (1.0 + xi) * np.log(surv)
            logjac[above] = logf - np.log(Fa) - 2.0 * np.log(-np.log(Fa))
        return z, logjac

    def frechet_threshold(self):
        """Threshold location on the Frechet scale: cdf(u) from the tail side."""
        return -1.0 / math.log1p(-self.zeta)


class MarginalModel:
    """Per-component marginal models for a D-dimensional dataset."""

    def __init__(self, components):
        self.components = tuple(components)
        self.dim = len(self.components)
        if self.dim == 0:
            raise UsageError("need at least one component")

    @classmethod
    def known_frechet(cls, dim):
        return cls([KnownFrechetMargin() for _ in range(dim)])

    @classmethod
    def fit_gev_margins(cls, maxima, block_length=1, tol=1e-11):
        """Fit a GEV to each column of a block-maxima matrix."""
        maxima = np.asarray(maxima, dtype=float)
        return cls([
            FittedGevMargin(fit_gev(maxima[:, d], tol=tol), block_length)
            for d in range(maxima.shape[1])
        ])

    @classmethod
    def fit_semiparametric(cls, data, p, tol=1e-11):
        """Empirical/GPD-tail composite per column with threshold probability p."""
        data = np.asarray(data, dtype=float)
        return cls([
            SemiParametricMargin.fit(data[:, d], p, tol=tol)
            for d in range(data.shape[1])
        ])

    @property
    def known(self):
        return all(isinstance(c, KnownFrechetMargin) for c in self.components)

    def transform(self, y):
        """Componentwise map to the Frechet scale.

        Returns (z, logjac) arrays of the input shape; logjac entries are nan
        where the composite transform is non-smooth (empirical part).
        """
        y = np.asarray(y, dtype=float)
        if y.ndim == 1:
            y = y[None, :]
            squeeze = True
        else:
            squeeze = False
        if y.shape[1] != self.dim:
            raise UsageError(f"data has {y.shape[1]} columns, model expects {self.dim}")
        z = np.empty_like(y)
        logjac = np.empty_like(y)
        for d, comp in enumerate(self.components):
            z[:, d], logjac[:, d] = comp.to_frechet(y[:, d])
        if squeeze:
            return z[0], logjac[0]
        return z, logjac


@dataclass(frozen=True)
class FrechetTransform:
    z: np.ndarray
    log_jacobian: float
    smooth: bool


def to_unit_frechet(y, model: MarginalModel) -> FrechetTransform:
    """Transform one observation vector to the unit Frechet scale.

    The total log-Jacobian is the sum of the per-component terms; it is only
    defined (smooth=True) when every component falls where its transform is
    differentiable -- for semi-parametric margins that is the GPD tail.
    """
    z, logjac = model.transform(np.asarray(y, dtype=float))
    smooth = bool(np.all(np.isfinite(logjac)))
    total = float(np.sum(logjac)) if smooth else float("nan")
    return FrechetTransform(z=z, log_jacobian=total, smooth=smooth)
