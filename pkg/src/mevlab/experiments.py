"""Replicated simulation studies: estimator comparisons, efficiency ratios,
and return-level prediction.

Every study maps a deterministic per-replicate stream (master seed, replicate
index) through simulate -> two-step fit -> record, so results are identical
across runs and across worker counts; reductions are ordered by replicate.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import EstimationError, UsageError
from .likelihoods import (
    ESTIMATORS,
    fit_estimator,
    make_block_maxima,
    select_threshold,
)
from .margins import MarginalModel
from .simulate import (
    SeedSpec,
    apply_truncated_t_margins,
    sample_logistic_maxstable,
    sample_opclayton,
)

# partition-sum objectives are practical only up to D = 10
FULL_LIKELIHOOD_ESTIMATORS = frozenset({"max1", "max3", "thr4", "thr5"})
FULL_LIKELIHOOD_MAX_DIM = 10

# margin-fit simplex tolerance inside studies (per-fit contracts use 1e-9)
_STUDY_FIT_TOL = 1e-8


@dataclass(frozen=True)
class EstimatorTask:
    """One estimator with its tuning: block length for the max family,
    threshold probability for the threshold family."""

    name: str
    tuning: float

    def __post_init__(self):
        if self.name not in ESTIMATORS:
            raise UsageError(f"unknown estimator {self.name!r}")
        if self.is_block:
            if not float(self.tuning).is_integer() or self.tuning < 2:
                raise UsageError("block length must be an integer >= 2")
        elif not 0.0 < self.tuning < 1.0:
            raise UsageError("threshold probability must be in (0, 1)")

    @property
    def is_block(self):
        return self.name.startswith("max")

    @property
    def label(self):
        return (f"L={int(self.tuning)}" if self.is_block else f"p={self.tuning:g}")


@dataclass(frozen=True)
class StudyConfig:
    """Specification of one simulation study cell."""

    model: str                      # "logistic" (exact) or "opclayton"
    alpha: float
    dim: int
    n: int
    replicates: int
    tasks: tuple                    # EstimatorTask grid
    margins_mode: str = "known"     # "known" or "fit" (two-step)
    master_seed: int = 0

    def __post_init__(self):
        if self.model not in ("logistic", "opclayton"):
            raise UsageError("model must be 'logistic' or 'opclayton'")
        if self.margins_mode not in ("known", "fit"):
            raise UsageError("margins_mode must be 'known' or 'fit'")
        if self.model == "opclayton" and self.margins_mode == "known":
            raise UsageError("copula data does not have known Frechet margins")
        if not 0.0 < self.alpha <= 1.0:
            raise UsageError("alpha must lie in (0, 1]")
        if self.replicates < 2:
            raise UsageError("need at least 2 replicates")
        for t in self.tasks:
            if (
                t.name in FULL_LIKELIHOOD_ESTIMATORS
                and self.dim > FULL_LIKELIHOOD_MAX_DIM
            ):
                raise UsageError(
                    f"{t.name} is gated to D <= {FULL_LIKELIHOOD_MAX_DIM}"
                )


def summarize(estimates, alpha_true):
    """Empirical bias, standard error (R-1 denominator) and RMSE."""
    estimates = np.asarray(estimates, dtype=float)
    if estimates.size < 2:
        raise UsageError("need at least two estimates to summarize")
    bias = float(np.mean(estimates) - alpha_true)
    se = float(np.std(estimates, ddof=1))
    return {"bias": bias, "se": se, "rmse": math.hypot(bias, se)}


@dataclass
class StudyResult:
    config: StudyConfig
    estimates: dict      # task -> (R,) array with nan for failures
    statuses: dict       # task -> list of status strings

    def n_ok(self, task):
        return int(np.isfinite(self.estimates[task]).sum())

    def summary(self, task):
        x = self.estimates[task]
        out = summarize(x[np.isfinite(x)], self.config.alpha)
        out["n_ok"] = self.n_ok(task)
        return out

    def summary_rows(self):
        rows = []
        for task in self.config.tasks:
            s = self.summary(task)
            rows.append({
                "estimator": task.name,
                "alpha_true": self.config.alpha,
                "D": self.config.dim,
                "tuning": task.label,
                "bias": s["bias"],
                "se": s["se"],
                "rmse": s["rmse"],
                "n_ok": s["n_ok"],
            })
        return rows

    def replicate_rows(self):
        rows = []
        for task in self.config.tasks:
            est = self.estimates[task]
            st = self.statuses[task]
            for r in range(self.config.replicates):
                rows.append({
                    "estimator": task.name,
                    "alpha_true": self.config.alpha,
                    "D": self.config.dim,
                    "tuning": task.label,
                    "replicate": r,
                    "alpha_hat": est[r],
                    "status": st[r],
                })
        return rows


def simulate_study_sample(config: StudyConfig, replicate):
    seed = SeedSpec(config.master_seed, replicate)
    if config.model == "logistic":
        return sample_logistic_maxstable(config.n, config.dim, config.alpha, seed)
    U = sample_opclayton(config.n, config.dim, config.alpha, seed)
    return apply_truncated_t_margins(U)


def _fit_replicate(config: StudyConfig, replicate):
    """All task fits on one replicate dataset; shares prepared data by tuning."""
    data = simulate_study_sample(config, replicate)
    known = config.margins_mode == "known"
    block_cache = {}
    marg_cache = {}
    thr_cache = {}
    out = {}
    for task in config.tasks:
        try:
            if task.is_block:
                L = int(task.tuning)
                if L not in block_cache:
                    block_cache[L] = make_block_maxima(
                        data, L, margins="known" if known else "fit",
                        fit_tol=_STUDY_FIT_TOL,
                    )
                prepared = block_cache[L]
            else:
                p = task.tuning
                kind = "diagonal" if task.name == "thr2" else "marginal"
                if known:
                    margins = "known"
                else:
                    if p not in marg_cache:
                        marg_cache[p] = MarginalModel.fit_semiparametric(
                            data, p, tol=_STUDY_FIT_TOL
                        )
                    margins = marg_cache[p]
                if (p, kind) not in thr_cache:
                    thr_cache[(p, kind)] = select_threshold(
                        p, kind, data, margins=margins
                    )
                prepared = thr_cache[(p, kind)]
            res = fit_estimator(task.name, prepared)
            if not res.converged:
                out[task] = (math.nan, f"failed: {res.diagnostics}")
            else:
                out[task] = (res.x, "ok")
        except EstimationError as exc:
            out[task] = (math.nan, f"failed: {exc}")
    return out


def run_study(config: StudyConfig, workers=1) -> StudyResult:
    """Run all replicates of a study cell.

    Per-replicate failures are recorded, not fatal; the failure rate shows up
    through `n_ok` in the summaries.  Output is independent of `workers`.
    """
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_rep = list(pool.map(
                _fit_replicate,
                [config] * config.replicates,
                range(config.replicates),
                chunksize=max(1, config.replicates // (4 * workers)),
            ))
    else:
        per_rep = [
            _fit_replicate(config, r) for r in range(config.replicates)
        ]
    estimates = {
        t: np.array([per_rep[r][t][0] for r in range(config.replicates)])
        for t in config.tasks
    }
    statuses = {
        t: [per_rep[r][t][1] for r in range(config.replicates)]
        for t in config.tasks
    }
    return StudyResult(config, estimates, statuses)


def default_task_grid(block_lengths=(50, 100), threshold_probs=(0.9, 0.95, 0.98)):
    """The all-estimator comparison grid used by the best-estimator table."""
    tasks = []
    for name in ("max1", "max2", "max3"):
        for L in block_lengths:
            tasks.append(EstimatorTask(name, L))
    for name in ("thr1", "thr2", "thr3", "thr4", "thr5"):
        for p in threshold_probs:
            tasks.append(EstimatorTask(name, p))
    return tuple(tasks)


def best_estimator_table(alphas, base_config: StudyConfig, workers=1):
    """Winner by RMSE per dependence value across an estimator/tuning grid."""
    rows = []
    for i, alpha in enumerate(alphas):
        config = replace(
            base_config, alpha=alpha,
            master_seed=base_config.master_seed + 7919 * i,
        )
        result = run_study(config, workers=workers)
        best = None
        for task in config.tasks:
            s = result.summary(task)
            if best is None or s["rmse"] < best[2]:
                best = (task.name, task.label, s["rmse"])
        rows.append({
            "alpha": alpha, "estimator": best[0], "tuning": best[1],
            "rmse": best[2],
        })
    return rows


def pairwise_efficiency_table(alphas, dims, base_config: StudyConfig,
                              block_length=100, threshold_prob=0.98,
                              workers=1):
    """Root efficiency (percent) of the pairwise estimators against their
    full-likelihood counterparts on common datasets.

    Cell value is 100 * se(full) / se(pair); both estimators see the same
    replicate data, so the ratio is a paired comparison.
    """
    rows = []
    for ai, alpha in enumerate(alphas):
        for di, dim in enumerate(dims):
            tasks = (
                EstimatorTask("max1", block_length),
                EstimatorTask("max_pair", block_length),
                EstimatorTask("thr4", threshold_prob),
                EstimatorTask("thr_pair", threshold_prob),
            )
            config = replace(
                base_config, alpha=alpha, dim=dim, tasks=tasks,
                master_seed=base_config.master_seed + 104729 * ai + 1299709 * di,
            )
            result = run_study(config, workers=workers)
            for family, full, pair in (
                ("max", tasks[0], tasks[1]), ("thr", tasks[2], tasks[3]),
            ):
                s_full = result.summary(full)["se"]
                s_pair = result.summary(pair)["se"]
                rows.append({
                    "family": family, "alpha": alpha, "D": dim,
                    "root_eff_percent": 100.0 * s_full / s_pair,
                    "n_ok": min(result.n_ok(full), result.n_ok(pair)),
                })
    return rows


# ---------------------------------------------------------------------------
# return levels
# ---------------------------------------------------------------------------

OBS_PER_YEAR = 100


def return_levels(alpha_hat, periods, mc_size, seed, dim=2) -> list:
    """Return levels of the component sum under the fitted dependence.

    For each period T (years at 100 observations per year) the
    (1 - 1/(100 T))-quantile of Y_1 + ... + Y_D is estimated from `mc_size`
    draws of the heavy-tailed copula model with the true margins and the
    supplied dependence value.  The quantile standard error uses the
    asymptotic formula with a spacing-based density estimate.
    """
    periods = list(periods)
    if not periods or min(periods) < 1 or max(periods) > 500:
        raise UsageError("periods must lie within [1, 500] years")
    qs = [1.0 - 1.0 / (OBS_PER_YEAR * T) for T in periods]
    need = 100 * OBS_PER_YEAR * max(periods)  # 100 expected tail points
    if mc_size < need:
        raise UsageError(
            f"mc_size {mc_size} leaves fewer than 100 expected tail points; "
            f"need at least {int(need)}"
        )
    U = sample_opclayton(mc_size, dim, alpha_hat, seed)
    total = np.sort(apply_truncated_t_margins(U).sum(axis=1))
    m = total.size
    out = []
    for T, q in zip(periods, qs):
        pos = q * (m - 1)
        k = int(pos)
        frac = pos - k
        level = total[k] * (1 - frac) + total[min(k + 1, m - 1)] * frac
        h = max(1, int(round(math.sqrt(m * q * (1.0 - q)))))
        lo = max(0, k - h)
        hi = min(m - 1, k + h)
        dens = (hi - lo) / (m * (total[hi] - total[lo]))
        se = math.sqrt(q * (1.0 - q) / m) / dens
        out.append({"period": T, "level": float(level), "stderr": float(se)})
    return out


@dataclass(frozen=True)
class ReturnLevelStudyConfig:
    alpha: float
    n: int = 2000
    replicates: int = 200
    block_length: int = 100
    threshold_prob: float = 0.98
    periods: tuple = (1, 2, 5, 10, 20, 50)
    mc_size: int = 500_000
    estimators: tuple = ESTIMATORS
    master_seed: int = 0


def run_return_level_study(config: ReturnLevelStudyConfig, workers=1):
    """Replicated return-level curves per estimator plus the true curve.

    The return-level map alpha -> quantiles uses one common random stream for
    every replicate and estimator, so differences across replicates reflect
    the dependence-estimation error alone.
    """
    tasks = tuple(
        EstimatorTask(e, config.block_length if e.startswith("max")
                      else config.threshold_prob)
        for e in config.estimators
    )
    study = StudyConfig(
        model="opclayton", alpha=config.alpha, dim=2, n=config.n,
        replicates=config.replicates, tasks=tasks, margins_mode="fit",
        master_seed=config.master_seed,
    )
    fits = run_study(study, workers=workers)
    rl_seed = SeedSpec(config.master_seed, 999_999_937)
    true_rows = return_levels(config.alpha, config.periods, config.mc_size,
                              rl_seed)
    true_levels = {r["period"]: r["level"] for r in true_rows}
    rows = []
    for task in tasks:
        est = fits.estimates[task]
        ok = np.isfinite(est)
        levels = np.full((config.replicates, len(config.periods)), np.nan)
        for r in np.nonzero(ok)[0]:
            rl = return_levels(est[r], config.periods, config.mc_size, rl_seed)
            levels[r] = [row["level"] for row in rl]
        for j, T in enumerate(config.periods):
            col = levels[ok][:, j]
            mean = float(col.mean())
            bias = mean - true_levels[T]
            se = float(col.std(ddof=1))
            rows.append({
                "estimator": task.name,
                "alpha_true": config.alpha,
                "period": T,
                "true_level": true_levels[T],
                "mean": mean,
                "bias": bias,
                "se": se,
                "rmse": math.hypot(bias, se),
                "n_ok": int(ok.sum()),
            })
    return rows


# ---------------------------------------------------------------------------
# CSV emission (shared by the command-line front end)
# ---------------------------------------------------------------------------

def format_value(x):
    """Shortest decimal that round-trips; plain text for the rest."""
    if isinstance(x, float):
        x = float(x)  # numpy scalars repr differently
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def write_csv(path, rows, columns, header_comments=()):
    """CSV with `#` comment lines carrying the resolved configuration."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(row[c]) for c in columns) + "\n")
