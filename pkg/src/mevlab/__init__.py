"""Likelihood estimators for multivariate extreme-value dependence.

Library layout: `model` (logistic exponent functions and derivatives),
`margins` (GEV/GPD margins and Frechet transforms), `simulate` (exact and
domain-of-attraction samplers), `likelihoods` (the objectives and their data
containers), `optimize` (derivative-free maximizers), `fisher` (information
per observation and efficiency tables), `experiments` (replicated studies),
`cli` (command line).
"""

from .errors import (
    CapabilityError,
    EstimationError,
    ThresholdTooLowError,
    UsageError,
)
from .model import (
    AsymLogisticParams,
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
)
from .margins import (
    FrechetTransform,
    GevParams,
    GpdParams,
    MarginalModel,
    fit_gev,
    fit_gpd,
    gev_transform,
    to_unit_frechet,
)
from .simulate import (
    SeedSpec,
    apply_truncated_t_margins,
    sample_asym_logistic_maxstable,
    sample_logistic_maxstable,
    sample_opclayton,
    sample_positive_stable,
    sample_study_data,
)
from .likelihoods import (
    ALPHA_BOUNDS,
    BlockMaximaData,
    ESTIMATORS,
    ThresholdData,
    censored_contrib,
    fit_estimator,
    loglik_count,
    loglik_max1,
    loglik_max2,
    loglik_max3,
    loglik_max_pair,
    loglik_thr1,
    loglik_thr2,
    loglik_thr3,
    loglik_thr4,
    loglik_thr5,
    loglik_thr_pair,
    make_block_maxima,
    select_threshold,
)
from .optimize import OptimResult, maximize_scalar, maximize_simplex
from .fisher import (
    AreConfig,
    InfoResult,
    are_table,
    info_block_max,
    info_censored,
    info_threshold_mc,
)
from .experiments import (
    EstimatorTask,
    ReturnLevelStudyConfig,
    StudyConfig,
    StudyResult,
    best_estimator_table,
    pairwise_efficiency_table,
    return_levels,
    run_return_level_study,
    run_study,
    summarize,
)

__version__ = "0.1.0"
