"""The block-maximum and threshold log-likelihood objectives.

All objectives are two-step: the marginal model is frozen inside the data
container and only the logistic dependence parameter moves.  Containers
pre-transform everything that does not depend on the dependence parameter
(Frechet-scale values, Jacobians, censoring patterns, occurrence-partition
block counts), so repeated evaluation inside an optimizer is a handful of
vectorized array operations.

Estimator names follow the conventional grouping: `max1` (full block-maximum
likelihood over all occurrence partitions), `max2` (observed occurrence
partitions, Stephenson-Tawn), `max3` (its second-order bias-corrected
variant), `max_pair` (pairwise block-maximum), `thr1` (point-process with
marginal thresholds), `thr2` (point-process with a diagonal threshold),
`thr3` (multivariate generalized-Pareto form), `thr4`/`thr5` (censored, with
max-stable and first-order tail forms), `thr_pair` (censored pairwise).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import CapabilityError, EstimationError, ThresholdTooLowError, UsageError
from .margins import MarginalModel
from .model import (
    AsymLogisticParams,
    LogisticParams,
    MAX_ENUMERATION_DIM,
    SetPartition,
    block_size_coefficients,
    partition_sum_coefficients,
)
from .optimize import OptimResult, maximize_scalar

ESTIMATORS = (
    "max1", "max2", "max3", "max_pair",
    "thr1", "thr2", "thr3", "thr4", "thr5", "thr_pair",
)

# dependence parameter search range: guard bands at both degenerate limits
ALPHA_BOUNDS = (0.01, 0.999)


def _objective_alpha(params, poisson_family=False) -> float:
    """Coerce the dependence argument of an objective to a logistic alpha."""
    if isinstance(params, AsymLogisticParams):
        if params.has_boundary_mass():
            if poisson_family:
                raise CapabilityError(
                    "point-process/GPD objectives need all exponent-measure mass "
                    "in the interior; asymmetric parameters put positive mass on "
                    "boundary faces"
                )
            raise CapabilityError(
                "objectives are implemented for the logistic family; asymmetric "
                "parameters are accepted only via their exact logistic reduction"
            )
        return params.reduce_to_logistic()
    if isinstance(params, LogisticParams):
        return params.alpha
    alpha = float(params)
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"alpha must lie in (0, 1], got {alpha!r}")
    return alpha


def _log_coeffs(alpha, kmax):
    """log of the block-size coefficients, -inf where they vanish (alpha=1)."""
    a = block_size_coefficients(alpha, kmax)
    with np.errstate(divide="ignore"):
        return np.log(a), a


def _log_partition_sum(alpha, k, log_s, sum_logz):
    """log of the partition sum over a k-coordinate exceedance set.

    Equals (-1/alpha - 1) * sum_logz + log sum_j B_kj s^(j alpha - k), the
    log of sum over partitions P of the set of prod over blocks of (-V_block).
    """
    B = partition_sum_coefficients(alpha, k)
    j = np.arange(1.0, k + 1.0)
    with np.errstate(divide="ignore"):
        logB = np.where(B > 0.0, np.log(np.where(B > 0.0, B, 1.0)), -np.inf)
    terms = logB[None, :] + np.outer(log_s, j * alpha - k)
    return (-1.0 / alpha - 1.0) * sum_logz + logsumexp(terms, axis=1)


def _resolve_margins(margins, data, p=None, block_length=None, fit_tol=1e-9):
    if isinstance(margins, MarginalModel):
        return margins
    if margins == "known":
        return MarginalModel.known_frechet(data.shape[1])
    if margins == "fit":
        if p is not None:
            return MarginalModel.fit_semiparametric(data, p, tol=fit_tol)
        return MarginalModel.fit_gev_margins(data, block_length or 1, tol=fit_tol)
    raise UsageError("margins must be a MarginalModel, 'known' or 'fit'")


# ---------------------------------------------------------------------------
# block maxima
# ---------------------------------------------------------------------------

class BlockMaximaData:
    """Componentwise block maxima with occurrence-time partitions.

    Construction pre-transforms the maxima to the Frechet scale and tabulates
    the partition block-size counts used by the occurrence-time likelihoods.
    """

    def __init__(self, maxima, partitions, block_length, margins, *,
                 known_raw_frechet=False):
        self.maxima = np.asarray(maxima, dtype=float)
        if self.maxima.ndim != 2:
            raise UsageError("maxima must be an N x D matrix")
        self.n_blocks, self.dim = self.maxima.shape
        self.partitions = tuple(partitions)
        if len(self.partitions) != self.n_blocks:
            raise UsageError("one occurrence partition per block is required")
        for part in self.partitions:
            if part.dim != self.dim:
                raise UsageError("partition dimension mismatch")
        self.block_length = int(block_length)
        self.margins = margins
        if known_raw_frechet:
            # raw data had known unit Frechet margins: the exact marginal
            # transform of a block maximum is division by the block length
            self.z = self.maxima / self.block_length
            logjac = np.full_like(self.z, -math.log(self.block_length))
        else:
            self.z, logjac = margins.transform(self.maxima)
        if np.any(self.z <= 0.0):
            raise EstimationError("block maxima mapped outside the Frechet scale")
        self.logz = np.log(self.z)
        finite = np.isfinite(logjac)
        self.log_jacobian = float(np.sum(logjac[finite]))
        self.jacobian_complete = bool(finite.all())
        # per-row block-size counts: counts[i, j-1] = #blocks of size j
        counts = np.zeros((self.n_blocks, self.dim), dtype=np.int64)
        for i, part in enumerate(self.partitions):
            for b in part.blocks:
                counts[i, len(b) - 1] += 1
        self.block_counts = counts
        self.n_partition_blocks = counts.sum(axis=1)
        self._pair_logz = None

    def pair_logz(self):
        """All componentwise pairs stacked into one (pairs * N, 2) matrix."""
        if self._pair_logz is None:
            self._pair_logz = np.concatenate(
                [self.logz[:, pair] for pair in _pair_index(self.dim)], axis=0
            )
        return self._pair_logz


def make_block_maxima(raw, block_length, margins="known", fit_tol=1e-9):
    """Split raw rows into blocks and collect componentwise maxima.

    Components whose maxima occur at the same within-block row index are
    grouped into one occurrence-partition block (exact index ties; with a
    zero atom the first occurrence wins).  A trailing partial block is
    dropped with a warning.  `margins`: "known" treats the raw margins as
    exactly unit Frechet, "fit" fits a GEV to each maxima column, or pass a
    MarginalModel for the maxima.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2:
        raise UsageError("raw data must be an n x D matrix")
    n, dim = raw.shape
    L = int(block_length)
    if L < 1 or L > n:
        raise UsageError("block length must be in [1, n]")
    n_blocks = n // L
    dropped = n - n_blocks * L
    if dropped:
        warnings.warn(f"dropping {dropped} trailing observations (partial block)")
    x = raw[: n_blocks * L].reshape(n_blocks, L, dim)
    maxima = x.max(axis=1)
    argmax = x.argmax(axis=1)  # first maximizer wins on ties
    partitions = []
    for i in range(n_blocks):
        groups = {}
        for d in range(dim):
            groups.setdefault(argmax[i, d], []).append(d)
        partitions.append(SetPartition(tuple(tuple(g) for g in groups.values())))
    known = margins == "known"
    model = (
        MarginalModel.known_frechet(dim)
        if known
        else _resolve_margins(margins, maxima, block_length=L, fit_tol=fit_tol)
    )
    return BlockMaximaData(
        maxima, partitions, L, model, known_raw_frechet=known
    )


def _block_full_rows(alpha, logz, log_s, sum_logz):
    """Per-row log density of the logistic max-stable law (full partition sum)."""
    D = logz.shape[1]
    V = np.exp(alpha * log_s)
    return _log_partition_sum(alpha, D, log_s, sum_logz) - V


def loglik_max1_rows(alpha, data: BlockMaximaData):
    alpha = _objective_alpha(alpha)
    if data.dim > MAX_ENUMERATION_DIM:
        raise CapabilityError(
            f"full likelihood needs the partition sum over Bell({data.dim}) "
            f"terms; guard is D <= {MAX_ENUMERATION_DIM}"
        )
    log_s = logsumexp(-data.logz / alpha, axis=1)
    return _block_full_rows(alpha, data.logz, log_s, data.logz.sum(axis=1))


def loglik_max1(alpha, data: BlockMaximaData) -> float:
    """Block-maximum log likelihood with the full partition sum."""
    return float(loglik_max1_rows(alpha, data).sum() + data.log_jacobian)


def _max2_rows(alpha, data, log_s):
    loga, a = _log_coeffs(alpha, data.dim)
    counts = data.block_counts
    dead = a <= 0.0
    base = counts @ np.where(dead, 0.0, loga)
    if dead.any():
        bad = (counts[:, dead] > 0).any(axis=1)
        base = np.where(bad, -np.inf, base)
    V = np.exp(alpha * log_s)
    return (
        base
        + (alpha * data.n_partition_blocks - data.dim) * log_s
        + (-1.0 / alpha - 1.0) * data.logz.sum(axis=1)
        - V
    )


def loglik_max2_rows(alpha, data: BlockMaximaData):
    alpha = _objective_alpha(alpha)
    log_s = logsumexp(-data.logz / alpha, axis=1)
    return _max2_rows(alpha, data, log_s)


def loglik_max2(alpha, data: BlockMaximaData) -> float:
    """Occurrence-time (Stephenson-Tawn) log likelihood."""
    return float(loglik_max2_rows(alpha, data).sum() + data.log_jacobian)


def loglik_max3_rows(alpha, data: BlockMaximaData):
    alpha = _objective_alpha(alpha)
    L = data.block_length
    log_s = logsumexp(-data.logz / alpha, axis=1)
    st_rows = _max2_rows(alpha, data, log_s)
    loga, a = _log_coeffs(alpha, data.dim)
    # merge ratio r[j1, j2] = a_{j1+j2} / (a_j1 a_j2); merging two blocks of a
    # partition multiplies its product of (-V_block) by r * s^(-alpha)
    k = data.dim
    rm = np.zeros((k, k))
    for j1 in range(1, k + 1):
        for j2 in range(1, k + 1):
            if j1 + j2 <= k:
                den = a[j1 - 1] * a[j2 - 1]
                rm[j1 - 1, j2 - 1] = a[j1 + j2 - 1] / den if den > 0 else 0.0
    counts = data.block_counts.astype(float)
    pair_sum = 0.5 * (
        np.einsum("ij,jk,ik->i", counts, rm, counts)
        - counts @ np.diag(rm)
    )
    nb = data.n_partition_blocks
    mult = 1.0 - nb * (nb - 1) / (2.0 * L) + np.exp(-alpha * log_s) * pair_sum / L
    with np.errstate(divide="ignore", invalid="ignore"):
        logmult = np.where(mult > 0.0, np.log(np.where(mult > 0.0, mult, 1.0)),
                           -np.inf)
    return st_rows + logmult


def loglik_max3(alpha, data: BlockMaximaData) -> float:
    """Bias-corrected occurrence-time log likelihood.

    Returns -inf when the correction bracket is non-positive at this alpha.
    """
    return float(loglik_max3_rows(alpha, data).sum() + data.log_jacobian)


def _pair_index(dim):
    return [(d1, d2) for d1 in range(dim) for d2 in range(d1 + 1, dim)]


def loglik_max_pair(alpha, data: BlockMaximaData) -> float:
    """Unweighted pairwise block-maximum log likelihood.

    Each pair contributes the bivariate version of the full likelihood
    (stacked into one workspace), so in two dimensions this is identical to
    `loglik_max1`.
    """
    alpha = _objective_alpha(alpha)
    logz = data.pair_logz()
    log_s = logsumexp(-logz / alpha, axis=1)
    total = _block_full_rows(alpha, logz, log_s, logz.sum(axis=1)).sum()
    # every coordinate's Jacobian appears once per pair that contains it
    return float(total + (data.dim - 1) * data.log_jacobian)


# ---------------------------------------------------------------------------
# threshold data
# ---------------------------------------------------------------------------

@dataclass
class _PatternGroup:
    cols: tuple                # exceedance coordinates of this censoring pattern
    logz: np.ndarray           # (m, k) log Frechet values at the exceedance coords
    other_log_zu: np.ndarray   # log thresholds of the censored coordinates
    jac: float                 # summed log-Jacobians over rows and exceedance coords
    rows: np.ndarray           # row indices (bookkeeping / tests)


class _CensoredLayout:
    """Flattened censored-likelihood workspace.

    Rows are grouped by exceedance-set size k; each group stacks the log
    Frechet values at the exceeding coordinates next to the log thresholds of
    the censored coordinates, so one objective evaluation is a handful of
    vectorized passes regardless of how many censoring patterns occur.  The
    fully-censored cells are (count, threshold-vector) pairs.
    """

    def __init__(self, groups, censored_counts, censored_log_zu):
        self.censored_counts = np.asarray(censored_counts, dtype=float)
        self.censored_log_zu = np.asarray(censored_log_zu, dtype=float)
        by_k = {}
        for g in groups:
            by_k.setdefault(len(g.cols), []).append(g)
        self.size_groups = {}
        for k, gs in sorted(by_k.items()):
            logz = np.concatenate([g.logz for g in gs], axis=0)
            others = np.concatenate(
                [np.broadcast_to(g.other_log_zu, (g.logz.shape[0],
                                                  g.other_log_zu.size))
                 for g in gs], axis=0,
            )
            jac = sum(g.jac for g in gs)
            self.size_groups[k] = (logz, others, jac)

    def loglik(self, alpha, variant):
        # fully censored cells
        lse_u = logsumexp(-self.censored_log_zu / alpha, axis=1)
        V_u = np.exp(alpha * lse_u)
        if variant == "ev":
            total = -float(self.censored_counts @ V_u)
        else:
            if np.any(V_u >= 1.0):
                raise ThresholdTooLowError(
                    f"tail form needs V(threshold) < 1, got {V_u.max():.4f}; "
                    f"raise the threshold probability"
                )
            total = float(self.censored_counts @ np.log1p(-V_u))
        for k, (logz, others, jac) in self.size_groups.items():
            lse_exc = logsumexp(-logz / alpha, axis=1)
            if others.shape[1]:
                log_s = np.logaddexp(
                    lse_exc, logsumexp(-others / alpha, axis=1)
                )
            else:
                log_s = lse_exc
            sum_logz = logz.sum(axis=1)
            if variant == "ev":
                rows = -np.exp(alpha * log_s) + _log_partition_sum(
                    alpha, k, log_s, sum_logz
                )
            else:
                loga, _a = _log_coeffs(alpha, k)
                rows = (
                    loga[k - 1] + (alpha - k) * log_s
                    + (-1.0 / alpha - 1.0) * sum_logz
                )
            total += rows.sum() + jac
        return total


class ThresholdData:
    """Raw observations with threshold metadata on the Frechet scale.

    `kind` is "marginal" (censoring indicators against per-component
    thresholds) or "diagonal" (radial exceedances of sum z_d / r_d > 1).
    Rows below every threshold are retained; they carry the censored mass.
    """

    def __init__(self, observations, kind, margins, zu=None, radius=None,
                 p=None):
        self.observations = np.asarray(observations, dtype=float)
        if self.observations.ndim != 2:
            raise UsageError("observations must be an n x D matrix")
        self.n, self.dim = self.observations.shape
        self.kind = kind
        self.margins = margins
        self.p = p
        z, logjac = margins.transform(self.observations)
        self.z = z
        self._logjac = logjac
        if kind == "marginal":
            if zu is None:
                raise UsageError("marginal kind needs the threshold vector")
            self.zu = np.asarray(zu, dtype=float)
            self.log_zu = np.log(self.zu)
            self.censoring = z > self.zu[None, :]
            exceed = self.censoring.any(axis=1)
            self.n_exceed = int(exceed.sum())
            self.n_censored = self.n - self.n_exceed
            self._build_groups()
            self._build_pointprocess(exceed)
        elif kind == "diagonal":
            if radius is None:
                raise UsageError("diagonal kind needs the radius")
            self.radius = float(radius)
            exceed = (z / self.radius).sum(axis=1) > 1.0
            self.n_exceed = int(exceed.sum())
            self._build_pointprocess(exceed)
        else:
            raise UsageError("kind must be 'marginal' or 'diagonal'")
        self._pair_cache = {}

    def _build_pointprocess(self, exceed):
        self.logz_exceed = np.log(self.z[exceed])
        jac = self._logjac[exceed]
        finite = np.isfinite(jac)
        self.jac_exceed = float(jac[finite].sum())
        self.jacobian_complete = bool(finite.all())

    def _build_groups(self):
        keys = self.censoring @ (1 << np.arange(self.dim))
        groups = []
        for key in np.unique(keys):
            if key == 0:
                continue
            rows = np.nonzero(keys == key)[0]
            mask = self.censoring[rows[0]]
            cols = tuple(np.nonzero(mask)[0].tolist())
            other = np.nonzero(~mask)[0]
            logz = np.log(self.z[np.ix_(rows, cols)])
            jac = float(self._logjac[np.ix_(rows, cols)].sum())
            groups.append(
                _PatternGroup(cols, logz, self.log_zu[other], jac, rows)
            )
        self.groups = groups
        self._layout = _CensoredLayout(
            groups, [self.n_censored], self.log_zu[None, :]
        )

    def _pair_groups(self, d1, d2):
        """Bivariate censoring groups reusing the cached transforms."""
        cens = self.censoring[:, [d1, d2]]
        log_zu = self.log_zu[[d1, d2]]
        patkey = cens @ np.array([1, 2])
        groups = []
        for code, cols in ((1, (0,)), (2, (1,)), (3, (0, 1))):
            rows = np.nonzero(patkey == code)[0]
            if rows.size == 0:
                continue
            src = [d1, d2]
            use = [src[c] for c in cols]
            other = [c for c in (0, 1) if c not in cols]
            logz = np.log(self.z[np.ix_(rows, use)])
            jac = float(self._logjac[np.ix_(rows, use)].sum())
            groups.append(
                _PatternGroup(cols, logz, log_zu[other], jac, rows)
            )
        n_cens = int((patkey == 0).sum())
        return groups, n_cens, log_zu

    def pair_layout(self):
        """One flattened workspace for all componentwise pairs."""
        if "pairs" not in self._pair_cache:
            groups = []
            counts = []
            zu_rows = []
            for d1, d2 in _pair_index(self.dim):
                g, n_cens, log_zu = self._pair_groups(d1, d2)
                groups.extend(g)
                counts.append(n_cens)
                zu_rows.append(log_zu)
            self._pair_cache["pairs"] = _CensoredLayout(
                groups, counts, np.array(zu_rows)
            )
        return self._pair_cache["pairs"]


def select_threshold(p, kind, data, margins="fit", fit_tol=1e-9) -> ThresholdData:
    """Build threshold data at probability level p.

    Marginal kind: thresholds are the per-component p-quantiles (exact
    -1/log p for known Frechet margins, the semi-parametric margin's own
    fitted threshold otherwise).  Diagonal kind: the radius D/(1-p) on the
    Frechet scale makes the expected exceedance fraction 1-p, because the
    measure of the radial set is sum 1/r_d regardless of the dependence.
    """
    if not 0.0 < p < 1.0:
        raise UsageError("threshold probability must be in (0, 1)")
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise UsageError("data must be an n x D matrix")
    n, dim = data.shape
    model = _resolve_margins(margins, data, p=p, fit_tol=fit_tol)
    if kind == "marginal":
        zu = np.empty(dim)
        for d, comp in enumerate(model.components):
            if hasattr(comp, "frechet_threshold"):
                try:
                    zu[d] = comp.frechet_threshold(p)
                except TypeError:
                    zu[d] = comp.frechet_threshold()
            else:
                raise UsageError(
                    "marginal thresholds need known-Frechet or semi-parametric "
                    "margins"
                )
        td = ThresholdData(data, "marginal", model, zu=zu, p=p)
        if td.n_exceed < 10:
            raise EstimationError(
                f"only {td.n_exceed} rows exceed the marginal threshold"
            )
        return td
    if kind == "diagonal":
        td = ThresholdData(data, "diagonal", model, radius=dim / (1.0 - p), p=p)
        if td.n_exceed < 10:
            raise EstimationError(
                f"only {td.n_exceed} rows exceed the diagonal threshold"
            )
        return td
    raise UsageError("kind must be 'marginal' or 'diagonal'")


# ---------------------------------------------------------------------------
# point-process / multivariate GPD objectives
# ---------------------------------------------------------------------------

def _log_neg_full_deriv(alpha, logz):
    """log(-V_{1:D}) per row: the point-process intensity on the Frechet scale."""
    D = logz.shape[1]
    loga, a = _log_coeffs(alpha, D)
    log_s = logsumexp(-logz / alpha, axis=1)
    with np.errstate(invalid="ignore"):
        return loga[D - 1] + (alpha - D) * log_s + (-1.0 / alpha - 1.0) * logz.sum(
            axis=1
        )


def _V_at(alpha, log_zu):
    return math.exp(alpha * logsumexp(-log_zu / alpha))


def loglik_thr1(alpha, data: ThresholdData) -> float:
    """Point-process log likelihood with marginal thresholds.

    The n observations form one point process whose mean number of threshold
    exceedances is n V(z_u) (V evaluated on the per-observation Frechet
    scale), so the void term carries the sample size; the per-point intensity
    log n factors are alpha-free and omitted.
    """
    alpha = _objective_alpha(alpha, poisson_family=True)
    if data.kind != "marginal":
        raise UsageError("thr1 needs marginal-threshold data")
    total = -data.n * _V_at(alpha, data.log_zu)
    if data.n_exceed:
        total += _log_neg_full_deriv(alpha, data.logz_exceed).sum() + data.jac_exceed
    return float(total)


def loglik_thr2(alpha, data: ThresholdData) -> float:
    """Point-process log likelihood above a diagonal threshold.

    Up to an additive constant: the measure of the radial exceedance set does
    not depend on the dependence parameter, so it is dropped.  Degenerates to
    -inf at alpha = 1 exactly (the limiting intensity vanishes in the
    interior), hence fits restrict to alpha < 1.
    """
    alpha = _objective_alpha(alpha, poisson_family=True)
    if data.kind != "diagonal":
        raise UsageError("thr2 needs diagonal-threshold data")
    if data.n_exceed == 0:
        return 0.0
    return float(
        _log_neg_full_deriv(alpha, data.logz_exceed).sum() + data.jac_exceed
    )


def loglik_thr3(alpha, data: ThresholdData) -> float:
    """Multivariate generalized-Pareto log likelihood (conditions on the count)."""
    alpha = _objective_alpha(alpha, poisson_family=True)
    if data.kind != "marginal":
        raise UsageError("thr3 needs marginal-threshold data")
    if data.n_exceed == 0:
        return 0.0
    V_u = _V_at(alpha, data.log_zu)
    return float(
        -data.n_exceed * math.log(V_u)
        + _log_neg_full_deriv(alpha, data.logz_exceed).sum()
        + data.jac_exceed
    )


def loglik_count(alpha, data: ThresholdData) -> float:
    """Log likelihood of the number of marginal-threshold exceedances.

    The count is Poisson with mean n V(z_u); the factorial term is constant
    in alpha and omitted.  thr1 - thr3 - this is constant in alpha.
    """
    alpha = _objective_alpha(alpha, poisson_family=True)
    V_star = data.n * _V_at(alpha, data.log_zu)
    return float(-V_star + data.n_exceed * math.log(V_star))


# ---------------------------------------------------------------------------
# censored objectives
# ---------------------------------------------------------------------------

def loglik_thr4(alpha, data: ThresholdData) -> float:
    """Censored log likelihood, max-stable tail form."""
    alpha = _objective_alpha(alpha)
    if data.kind != "marginal":
        raise UsageError("censored objectives need marginal-threshold data")
    return float(data._layout.loglik(alpha, "ev"))


def loglik_thr5(alpha, data: ThresholdData) -> float:
    """Censored log likelihood, first-order tail form.

    Raises ThresholdTooLowError when V at the threshold reaches one (the
    fully-censored cell mass 1 - V would not be a probability).
    """
    alpha = _objective_alpha(alpha)
    if data.kind != "marginal":
        raise UsageError("censored objectives need marginal-threshold data")
    return float(data._layout.loglik(alpha, "tail"))


def loglik_thr_pair(alpha, data: ThresholdData) -> float:
    """Unweighted censored pairwise log likelihood (max-stable tail form).

    Identical to `loglik_thr4` in two dimensions by construction: the single
    pair's workspace holds exactly the same arrays.
    """
    alpha = _objective_alpha(alpha)
    if data.kind != "marginal":
        raise UsageError("censored objectives need marginal-threshold data")
    return float(data.pair_layout().loglik(alpha, "ev"))


def censored_contrib(y, u, alpha, margins, variant="ev") -> float:
    """Log censored contribution of a single observation vector.

    Coordinates at or below their threshold enter through the threshold value
    only; coordinates above contribute their density factor (a partition sum
    over the exceedance set for the max-stable form, a single mixed
    derivative for the tail form) and their transform Jacobians.
    """
    alpha = _objective_alpha(alpha)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if y.shape != u.shape or y.ndim != 1:
        raise UsageError("y and u must be vectors of equal length")
    if variant not in ("ev", "tail"):
        raise UsageError("variant must be 'ev' or 'tail'")
    delta = y > u
    b = np.maximum(y, u)
    z, logjac = margins.transform(b)
    log_z = np.log(z)
    cols = np.nonzero(delta)[0]
    if cols.size == 0:
        V = _V_at(alpha, log_z)
        if variant == "ev":
            return float(-V)
        if V >= 1.0:
            raise ThresholdTooLowError("tail form needs V(threshold) < 1")
        return float(math.log1p(-V))
    other = np.nonzero(~delta)[0]
    zu, _ = margins.transform(u)
    group = _PatternGroup(
        tuple(cols.tolist()), log_z[None, cols], log_z[other],
        float(logjac[cols].sum()), np.array([0]),
    )
    layout = _CensoredLayout([group], [0], np.log(zu)[None, :])
    return float(layout.loglik(alpha, variant))


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

_OBJECTIVES = {
    "max1": loglik_max1,
    "max2": loglik_max2,
    "max3": loglik_max3,
    "max_pair": loglik_max_pair,
    "thr1": loglik_thr1,
    "thr2": loglik_thr2,
    "thr3": loglik_thr3,
    "thr4": loglik_thr4,
    "thr5": loglik_thr5,
    "thr_pair": loglik_thr_pair,
}


def objective(name):
    try:
        return _OBJECTIVES[name]
    except KeyError:
        raise UsageError(
            f"unknown estimator {name!r}; choose from {', '.join(ESTIMATORS)}"
        ) from None


def fit_estimator(name, data, bounds=ALPHA_BOUNDS, tol=1e-6, probes=33) -> OptimResult:
    """Maximize one objective over the dependence parameter.

    Objectives that are -inf at extreme alpha (censored tail form, corrected
    occurrence-time) are handled by the probe-and-contract scalar search;
    the tail-form precondition failure is treated as out-of-domain here
    rather than raised, so the feasible range is found automatically.
    """
    f = objective(name)

    def wrapped(alpha):
        try:
            return f(alpha, data)
        except ThresholdTooLowError:
            return -math.inf

    lo, hi = bounds
    return maximize_scalar(wrapped, lo, hi, tol=tol, probes=probes)
