"""Logistic and asymmetric-logistic max-stable dependence models.

The exponent function V of a max-stable distribution G = exp(-V) on the unit
Frechet scale is homogeneous of order -1 and satisfies the marginal
constraints V(inf, ..., z, ..., inf) = 1/z.  This module provides the two
logistic families, their exact mixed partial derivatives in the coordinates
and in the dependence parameter, and the set-partition combinatorics that the
likelihood objectives are built from.

Everything here is a pure function of value-type inputs, safe for concurrent
use.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import logsumexp

from .errors import CapabilityError, UsageError

# Bell(12) ~ 4.2e6 is the practical ceiling for full partition sums.
MAX_ENUMERATION_DIM = 12

BELL_NUMBERS = (1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597)


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogisticParams:
    """Symmetric logistic dependence parameter.

    alpha in (0, 1]; alpha = 1 is independence and alpha -> 0 approaches
    complete dependence.
    """

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a <= 1.0) or not np.isfinite(a):
            raise UsageError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


def _as_alpha(params) -> float:
    """Accept a bare float, LogisticParams, or a reducible AsymLogisticParams."""
    if isinstance(params, LogisticParams):
        return params.alpha
    if isinstance(params, AsymLogisticParams):
        alpha = params.reduce_to_logistic()
        if alpha is None:
            raise CapabilityError(
                "asymmetric-logistic parameters with mass on proper subsets are "
                "not supported here; only the exact logistic reduction is"
            )
        return alpha
    return LogisticParams(float(params)).alpha


class AsymLogisticParams:
    """Asymmetric logistic parameters.

    `alpha_of` maps each non-singleton subset E of {0, ..., dim-1} (as a
    frozenset) to a dependence parameter in (0, 1]; `theta_of` maps pairs
    (E, d) with d in E to weights in [0, 1].  For every component d the
    weights over subsets containing d must sum to one.  Subsets may be
    omitted, in which case all their weights are zero and they contribute
    nothing.
    """

    def __init__(self, dim, alpha_of, theta_of):
        if dim < 2:
            raise UsageError("dim must be >= 2")
        self.dim = int(dim)
        full = frozenset(range(self.dim))
        alpha_clean = {}
        for E, a in alpha_of.items():
            E = frozenset(E)
            if not E or not E <= full:
                raise UsageError(f"subset {set(E)} not within {{0..{dim - 1}}}")
            if len(E) > 1 and not 0.0 < float(a) <= 1.0:
                raise UsageError(f"alpha for subset {sorted(E)} must be in (0, 1]")
            alpha_clean[E] = float(a)
        theta_clean = {}
        for (E, d), w in theta_of.items():
            E = frozenset(E)
            if d not in E:
                raise UsageError(f"component {d} not in subset {sorted(E)}")
            w = float(w)
            if not 0.0 <= w <= 1.0:
                raise UsageError("weights must lie in [0, 1]")
            if w > 0.0:
                theta_clean[(E, d)] = w
        for d in range(self.dim):
            total = sum(w for (E, dd), w in theta_clean.items() if dd == d)
            if abs(total - 1.0) > 1e-12:
                raise UsageError(
                    f"weights for component {d} sum to {total!r}, expected 1"
                )
        for (E, _d) in theta_clean:
            if len(E) > 1 and E not in alpha_clean:
                raise UsageError(
                    f"subset {sorted(E)} carries weight but has no dependence parameter"
                )
        self.alpha_of = alpha_clean
        self.theta_of = theta_clean
        # subsets that actually contribute: at least one positive weight
        self.active_subsets = tuple(
            sorted({E for (E, _d) in theta_clean}, key=lambda E: (len(E), sorted(E)))
        )

    @classmethod
    def logistic_embedding(cls, dim, alpha):
        """All mass on the full index set: reproduces the symmetric model."""
        full = frozenset(range(dim))
        return cls(
            dim,
            {full: alpha},
            {(full, d): 1.0 for d in range(dim)},
        )

    def theta(self, E, d):
        return self.theta_of.get((frozenset(E), d), 0.0)

    def has_boundary_mass(self) -> bool:
        """True when some mass sits on a proper subset of the components."""
        full = frozenset(range(self.dim))
        return any(E != full for (E, _d) in self.theta_of)

    def reduce_to_logistic(self):
        """Return alpha when this is exactly the symmetric model, else None."""
        if self.has_boundary_mass():
            return None
        full = frozenset(range(self.dim))
        return self.alpha_of[full]


@dataclass(frozen=True)
class SetPartition:
    """Partition of {0, ..., D-1} into disjoint blocks.

    Canonical form: each block sorted, blocks ordered by smallest element,
    so equality and hashing are structural.
    """

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        blocks = tuple(sorted(blocks, key=lambda b: b[0]))
        seen = set()
        for b in blocks:
            if not b:
                raise UsageError("empty block in partition")
            for i in b:
                if i in seen:
                    raise UsageError(f"index {i} appears in two blocks")
                seen.add(i)
        if seen != set(range(len(seen))):
            raise UsageError("blocks must cover {0, ..., D-1} without gaps")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self):
        return sum(len(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def block_sizes(self):
        return tuple(len(b) for b in self.blocks)


# ---------------------------------------------------------------------------
# partition combinatorics
# ---------------------------------------------------------------------------

def enumerate_partitions(D):
    """All set partitions of {0, ..., D-1}, each exactly once, canonical order.

    Iterates restricted-growth strings: a[i] <= 1 + max(a[:i]) with a[0] = 0,
    so blocks come out ordered by smallest element.  Guarded to D <= 12
    because the count is the Bell number (Bell(12) ~ 4.2e6).
    """
    if not 1 <= D <= MAX_ENUMERATION_DIM:
        raise UsageError(
            f"D must be in [1, {MAX_ENUMERATION_DIM}]; Bell-number growth makes "
            f"larger D impractical (got {D})"
        )
    out = []
    a = [0] * D
    while True:
        nblocks = max(a) + 1
        blocks = [[] for _ in range(nblocks)]
        for i, lab in enumerate(a):
            blocks[lab].append(i)
        out.append(SetPartition(tuple(tuple(b) for b in blocks)))
        # next restricted-growth string
        i = D - 1
        while i > 0:
            if a[i] <= max(a[:i]):
                a[i] += 1
                for j in range(i + 1, D):
                    a[j] = 0
                break
            i -= 1
        else:
            return out


def coarsen_by_one(partition: SetPartition):
    """All partitions obtained by merging exactly two blocks.

    These are precisely the coarsenings whose cardinality is one less; there
    are |P| (|P| - 1) / 2 of them.
    """
    blocks = partition.blocks
    out = []
    for i, j in combinations(range(len(blocks)), 2):
        merged = tuple(sorted(blocks[i] + blocks[j]))
        rest = tuple(b for k, b in enumerate(blocks) if k not in (i, j))
        out.append(SetPartition(rest + (merged,)))
    return out


# ---------------------------------------------------------------------------
# logistic exponent function and derivatives
# ---------------------------------------------------------------------------

def _check_positive(z):
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise UsageError("z must be a non-empty 1-D vector")
    if not np.all(z > 0.0) or not np.all(np.isfinite(z)):
        raise UsageError("all coordinates must be positive and finite")
    return z


def exponent_logistic(z, params) -> float:
    """Logistic exponent function (sum of z_d^(-1/alpha))^alpha.

    Computed through logsumexp so that extreme coordinate scales and small
    alpha do not overflow.
    """
    z = _check_positive(z)
    alpha = _as_alpha(params)
    return float(np.exp(alpha * logsumexp(-np.log(z) / alpha)))


def block_size_coefficients(alpha, kmax):
    """Coefficients a_m = prod_{j=1}^{m-1} (j - alpha) / alpha^(m-1), m = 1..kmax.

    The mixed partial of the logistic exponent function over a coordinate set E
    of size m is -a_m * s^(alpha-m) * prod_{d in E} z_d^(-1/alpha - 1) with
    s = sum z_d^(-1/alpha); a_m > 0 for alpha < 1 and a_m = 0 for alpha = 1,
    m >= 2.
    """
    a = np.empty(kmax)
    a[0] = 1.0
    for m in range(2, kmax + 1):
        a[m - 1] = a[m - 2] * (m - 1 - alpha) / alpha
    return a


def partition_sum_coefficients(alpha, k):
    """B[k][j]: sum over partitions of a k-set into j blocks of prod a_{|block|}.

    Satisfies the partial-Bell-polynomial recurrence
    B(k, j) = sum_m C(k-1, m-1) a_m B(k-m, j-1).  Together with
    s^(j*alpha - k) these give every partition sum the likelihoods need in
    O(k^2) instead of Bell(k) work.
    """
    a = block_size_coefficients(alpha, k)
    B = np.zeros((k + 1, k + 1))
    B[0, 0] = 1.0
    comb = np.zeros((k + 1, k + 1))
    comb[0, 0] = 1.0
    for n in range(1, k + 1):
        comb[n, 0] = 1.0
        for r in range(1, n + 1):
            comb[n, r] = comb[n - 1, r - 1] + comb[n - 1, r]
    for n in range(1, k + 1):
        for j in range(1, n + 1):
            total = 0.0
            for m in range(1, n - j + 2):
                total += comb[n - 1, m - 1] * a[m - 1] * B[n - m, j - 1]
            B[n, j] = total
    return B[k, 1:k + 1]


def partial_deriv_logistic(z, params, E) -> float:
    """Mixed partial derivative of the logistic exponent function.

    E is the non-empty set of coordinate indices differentiated against.  The
    closed form is (-1/alpha)^k [prod_{j<k} (alpha - j)] s^(alpha-k)
    prod_{d in E} z_d^(-1/alpha - 1); it is negative for every E when
    alpha < 1 and vanishes for |E| >= 2 at alpha = 1.
    """
    z = _check_positive(z)
    alpha = _as_alpha(params)
    E = sorted(set(int(d) for d in E))
    if not E:
        raise UsageError("E must be a non-empty set of coordinate indices")
    if E[0] < 0 or E[-1] >= z.size:
        raise UsageError("E refers to coordinates outside z")
    k = len(E)
    logz = np.log(z)
    log_s = logsumexp(-logz / alpha)
    a = block_size_coefficients(alpha, k)[k - 1]
    if a == 0.0:
        return 0.0
    log_abs = (
        np.log(a)
        + (alpha - k) * log_s
        + (-1.0 / alpha - 1.0) * logz[E].sum()
    )
    return float(-np.exp(log_abs))


def ev_density_logistic(z, params) -> float:
    """Density of the logistic max-stable distribution on the unit Frechet scale.

    exp(-V) times the sum over all partitions of prod over blocks of (-V_block);
    evaluated through partition-sum coefficients, which agrees with explicit
    enumeration but stays polynomial in the dimension.
    """
    z = _check_positive(z)
    alpha = _as_alpha(params)
    D = z.size
    if D > MAX_ENUMERATION_DIM:
        raise CapabilityError(
            f"density needs the full partition sum; Bell({D}) terms is beyond the "
            f"D <= {MAX_ENUMERATION_DIM} guard"
        )
    logz = np.log(z)
    log_s = logsumexp(-logz / alpha)
    V = np.exp(alpha * log_s)
    B = partition_sum_coefficients(alpha, D)
    j = np.arange(1, D + 1)
    with np.errstate(divide="ignore"):
        logB = np.where(B > 0.0, np.log(np.where(B > 0.0, B, 1.0)), -np.inf)
    log_sum = logsumexp(logB + (j * alpha - D) * log_s)
    log_density = -V + (-1.0 / alpha - 1.0) * logz.sum() + log_sum
    return float(np.exp(log_density))


# ---------------------------------------------------------------------------
# bivariate derivatives in the coordinates and the dependence parameter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BivariateDerivs:
    """V and its partial derivatives at a bivariate point.

    Suffix convention: digits are coordinate derivatives, `a` is a derivative
    in the dependence parameter (`aa` second order).
    """

    V: float
    V1: float
    V2: float
    V12: float
    Va: float
    Vaa: float
    V1a: float
    V2a: float
    V12a: float


def _bivariate_derivs_arrays(z1, z2, alpha):
    """Vectorized closed forms for the nine bivariate quantities.

    Stable at alpha = 1: the mixed-coordinate derivatives go to zero
    smoothly and the alpha-derivatives stay finite.
    """
    l1 = np.log(z1)
    l2 = np.log(z2)
    x1 = np.exp(-l1 / alpha)
    x2 = np.exp(-l2 / alpha)
    s = x1 + x2
    L = np.log(s)
    ra = 1.0 / alpha
    sa = (x1 * l1 + x2 * l2) * ra * ra
    saa = (x1 * l1 * (l1 * ra - 2.0) + x2 * l2 * (l2 * ra - 2.0)) * ra**3
    V = s**alpha
    V1 = -(s ** (alpha - 1.0)) * x1 / z1
    V2 = -(s ** (alpha - 1.0)) * x2 / z2
    cross = (s ** (alpha - 2.0)) * x1 * x2 / (z1 * z2)
    V12 = (alpha - 1.0) * ra * cross
    A = L + alpha * sa / s
    Va = V * A
    Aa = 2.0 * sa / s + alpha * saa / s - alpha * (sa / s) ** 2
    Vaa = V * (A * A + Aa)
    V1a = V1 * (L + (alpha - 1.0) * sa / s + l1 * ra * ra)
    V2a = V2 * (L + (alpha - 1.0) * sa / s + l2 * ra * ra)
    V12a = cross * (
        (alpha - 1.0) * ra * (L + (alpha - 2.0) * sa / s + (l1 + l2) * ra * ra)
        + ra * ra
    )
    return V, V1, V2, V12, Va, Vaa, V1a, V2a, V12a


def alpha_derivs_bivariate(z, params) -> BivariateDerivs:
    """All bivariate derivatives needed by the information quadratures."""
    z = _check_positive(z)
    if z.size != 2:
        raise UsageError("exactly two coordinates expected")
    alpha = _as_alpha(params)
    vals = _bivariate_derivs_arrays(z[0], z[1], alpha)
    return BivariateDerivs(*(float(v) for v in vals))


# ---------------------------------------------------------------------------
# asymmetric logistic model
# ---------------------------------------------------------------------------

def exponent_asym_logistic(z, params: AsymLogisticParams) -> float:
    """Asymmetric-logistic exponent function.

    Sum over active subsets E of {sum_{d in E} (z_d / w_{E,d})^(-1/alpha_E)}^alpha_E,
    with the convention that zero-weight terms contribute nothing (the
    continuous limit w -> 0).
    """
    z = _check_positive(z)
    if z.size != params.dim:
        raise UsageError(f"z has {z.size} coordinates, params expect {params.dim}")
    logz = np.log(z)
    total = 0.0
    for E in params.active_subsets:
        idx = sorted(E)
        w = np.array([params.theta(E, d) for d in idx])
        live = w > 0.0
        if not live.any():
            continue
        if len(idx) == 1:
            total += w[0] / z[idx[0]]
            continue
        aE = params.alpha_of[E]
        lz = logz[idx][live] - np.log(w[live])
        total += np.exp(aE * logsumexp(-lz / aE))
    return float(total)


def partial_deriv_asym_logistic(z, params: AsymLogisticParams, E) -> float:
    """Mixed partial of the asymmetric-logistic exponent function.

    Each active subset contributes a logistic-type term in its own scaled
    coordinates, so the mixed partial against a coordinate set C is the sum
    over active subsets containing C (with positive weight on all of C) of the
    corresponding logistic mixed partial.
    """
    z = _check_positive(z)
    if z.size != params.dim:
        raise UsageError(f"z has {z.size} coordinates, params expect {params.dim}")
    C = frozenset(int(d) for d in E)
    if not C:
        raise UsageError("E must be a non-empty set of coordinate indices")
    if not C <= frozenset(range(params.dim)):
        raise UsageError("E refers to coordinates outside z")
    k = len(C)
    logz = np.log(z)
    total = 0.0
    for S in params.active_subsets:
        if not C <= S:
            continue
        idx = sorted(S)
        w = np.array([params.theta(S, d) for d in idx])
        if any(params.theta(S, d) == 0.0 for d in C):
            continue
        if len(idx) == 1:
            # singleton term w/z: first derivative is -w/z^2
            (d,) = idx
            total += -w[0] / z[d] ** 2 if k == 1 else 0.0
            continue
        aE = params.alpha_of[S]
        live = w > 0.0
        lz = (logz[idx] - np.log(np.where(live, w, 1.0)))[live]
        log_s = logsumexp(-lz / aE)
        a_k = block_size_coefficients(aE, k)[k - 1]
        if a_k == 0.0:
            continue
        lsum = sum(
            (-1.0 / aE - 1.0) * (logz[d] - np.log(params.theta(S, d))) for d in C
        )
        # each scaled coordinate differentiates with an extra 1/theta factor
        lsum += sum(-np.log(params.theta(S, d)) for d in C)
        total += -np.exp(np.log(a_k) + (aE - k) * log_s + lsum)
    return float(total)
