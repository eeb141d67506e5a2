"""Two-step dependence estimation with every objective in the package.

The pipeline mirrors practice: margins first (GEV for block maxima, a
semi-parametric empirical/GPD composite for threshold exceedances), then the
logistic dependence parameter by maximizing each objective with the margins
frozen.
"""

from mevlab import (
    ESTIMATORS,
    SeedSpec,
    fit_estimator,
    make_block_maxima,
    sample_study_data,
    select_threshold,
)

alpha_true = 0.6
data = sample_study_data(20_000, 2, alpha_true, SeedSpec(7))
print(f"data: {data.shape[0]} rows, true dependence parameter {alpha_true}")

# block-maximum objectives share one prepared container per block length;
# threshold objectives share one per threshold probability
blocks = make_block_maxima(data, block_length=100, margins="fit")
marginal = select_threshold(0.95, "marginal", data, margins="fit")
diagonal = select_threshold(0.95, "diagonal", data, margins="fit")

print(f"{blocks.n_blocks} block maxima; {marginal.n_exceed} marginal-threshold "
      f"rows; {diagonal.n_exceed} diagonal-threshold rows\n")

for name in ESTIMATORS:
    prepared = (blocks if name.startswith("max")
                else diagonal if name == "thr2" else marginal)
    res = fit_estimator(name, prepared)
    print(f"{name:9s} alpha_hat = {res.x:.4f}   "
          f"({res.iterations} iterations, {res.diagnostics})")

print("\nmax_pair equals max1 and thr_pair equals thr4 in two dimensions;")
print("the uncensored point-process fits (thr1-thr3) sit lower: at this")
print("threshold the data are not yet in their asymptotic regime, which is")
print("exactly the bias the simulation studies quantify.")
