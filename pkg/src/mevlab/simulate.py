"""Random generation: positive stable variates, exact logistic max-stable
samples, and the heavy-tailed copula data used by the simulation studies.

All sampling is driven by `SeedSpec`, a (master seed, stream id) pair that
maps to an independent, reproducible generator; different stream ids give
streams that can be consumed concurrently without any shared state.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .model import AsymLogisticParams, LogisticParams, _as_alpha


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic stream address.

    The generator is PCG64 seeded with SeedSequence(master_seed,
    spawn_key=(stream_id,)), so the map (master_seed, stream_id) -> stream is
    injective and identical across processes and platforms.
    """

    master_seed: int
    stream_id: int = 0

    def rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream_id) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_id)


def _coerce_seed(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.rng()
    return SeedSpec(int(seed)).rng()


def sample_positive_stable(alpha, rng, size=None):
    """Positive stable variates with Laplace transform exp(-t^alpha).

    Kanter's form of the Chambers-Mallows-Stuck construction: with U uniform
    on (0, pi) and W unit exponential,
        S = (a(U) / W)^((1-alpha)/alpha),
        a(u) = sin((1-alpha)u) sin(alpha u)^(alpha/(1-alpha)) / sin(u)^(1/(1-alpha)).
    alpha = 1 is the unit point mass.
    """
    if not 0.0 < alpha <= 1.0:
        raise UsageError("alpha must lie in (0, 1]")
    rng = _coerce_seed(rng)
    shape = () if size is None else size
    if alpha == 1.0:
        out = np.ones(shape)
        return float(out) if size is None else out
    U = rng.uniform(0.0, np.pi, shape)
    W = rng.standard_exponential(shape)
    # log-space evaluation: the direct powers underflow for alpha near 1
    log_a = (
        np.log(np.sin((1.0 - alpha) * U))
        + alpha / (1.0 - alpha) * np.log(np.sin(alpha * U))
        - 1.0 / (1.0 - alpha) * np.log(np.sin(U))
    )
    S = np.exp((1.0 - alpha) / alpha * (log_a - np.log(W)))
    return float(S) if size is None else S


def sample_logistic_maxstable(n, dim, params, seed) -> np.ndarray:
    """Exact samples from the logistic max-stable law with unit Frechet margins.

    Rows are Z_d = (S / E_d)^alpha with one positive alpha-stable S per row
    and independent unit exponentials E_d, which has joint cdf
    exp(-(sum z_d^(-1/alpha))^alpha).
    """
    alpha = params.alpha if isinstance(params, LogisticParams) else _as_alpha(params)
    rng = _coerce_seed(seed)
    S = sample_positive_stable(alpha, rng, size=n)
    E = rng.standard_exponential((n, dim))
    return (S[:, None] / E) ** alpha


def sample_asym_logistic_maxstable(n, params: AsymLogisticParams, seed) -> np.ndarray:
    """Asymmetric-logistic samples via the weighted-maximum embedding.

    For each active subset E draw an independent logistic max-stable vector
    with that subset's dependence parameter, scale component d by its weight,
    and take componentwise maxima across subsets.  Weights summing to one per
    component keeps the margins unit Frechet.
    """
    rng = _coerce_seed(seed)
    out = np.zeros((n, params.dim))
    for E in params.active_subsets:
        idx = sorted(E)
        w = np.array([params.theta(E, d) for d in idx])
        if len(idx) == 1:
            piece = 1.0 / rng.standard_exponential((n, 1))
        else:
            aE = params.alpha_of[E]
            S = sample_positive_stable(aE, rng, size=n)
            piece = (S[:, None] / rng.standard_exponential((n, len(idx)))) ** aE
        out[:, idx] = np.maximum(out[:, idx], w * piece)
    return out


def sample_opclayton(n, dim, alpha, seed) -> np.ndarray:
    """Archimedean copula with generator (t^alpha + 1)^(-1) (outer power Clayton).

    Frailty construction: V = V0^(1/alpha) * S with V0 unit exponential and S
    positive alpha-stable, whose Laplace transform is exactly the generator;
    then U_d = phi(E_d / V) with independent unit exponentials E_d.  The
    resulting law is in the max-domain of attraction of the logistic model
    with the same alpha.
    """
    if not 0.0 < alpha <= 1.0:
        raise UsageError("alpha must lie in (0, 1]")
    rng = _coerce_seed(seed)
    V0 = rng.standard_exponential(n)
    S = sample_positive_stable(alpha, rng, size=n)
    V = V0 ** (1.0 / alpha) * S
    E = rng.standard_exponential((n, dim))
    return ((E / V[:, None]) ** alpha + 1.0) ** -1.0


def _t5_quantile_upper(u):
    """Student t(5) quantile for u in (0.5, 1), vectorized, abs error < 1e-12.

    For five degrees of freedom the cdf is elementary: with theta =
    arctan(t / sqrt(5)),
        T5(t) = 1/2 + (theta + sin(theta) cos(theta) (1 + (2/3) cos^2(theta))) / pi,
    and the derivative in theta is (8/3) cos^4(theta).  Bisection plus Newton
    on theta inverts this an order of magnitude faster than a generic
    incomplete-beta inversion; beyond u = 0.999 cancellation near theta =
    pi/2 would spoil it, so the few extreme-tail points fall back to the
    incomplete-beta route.
    """
    u = np.asarray(u, dtype=float)
    target = np.pi * (u - 0.5)

    def g(theta):
        s, c = np.sin(theta), np.cos(theta)
        return theta + s * c * (1.0 + (2.0 / 3.0) * c * c)

    lo = np.zeros_like(target)
    hi = np.full_like(target, np.pi / 2.0)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        below = g(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    theta = 0.5 * (lo + hi)
    for _ in range(3):
        c = np.cos(theta)
        step = (g(theta) - target) / ((8.0 / 3.0) * c**4)
        theta = np.clip(theta - step, lo, hi)
    out = np.sqrt(5.0) * np.tan(theta)
    deep = u > 0.999
    if np.any(deep):
        from scipy.special import stdtrit

        out[deep] = stdtrit(5, u[deep])
    return out


def apply_truncated_t_margins(U) -> np.ndarray:
    """Quantile-transform uniforms to zero-truncated Student t(5) margins.

    The target is Y = max(0, T) with T ~ t(5): a point mass of one half at
    zero and the t(5) upper tail above it, so the quantile map is Y = 0 for
    U <= 0.5 (the atom takes the boundary) and the t(5) quantile of U above.
    """
    U = np.asarray(U, dtype=float)
    if np.any(U <= 0.0) or np.any(U >= 1.0):
        raise UsageError("uniforms must lie strictly inside (0, 1)")
    out = np.zeros_like(U)
    pos = U > 0.5
    out[pos] = _t5_quantile_upper(U[pos])
    return out


def sample_study_data(n, dim, alpha, seed) -> np.ndarray:
    """Heavy-tailed positive data in the logistic max-domain of attraction."""
    U = sample_opclayton(n, dim, alpha, seed)
    return apply_truncated_t_margins(U)
