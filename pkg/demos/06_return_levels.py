"""Return levels of the component sum under estimated dependence.

A T-year return level (at 100 observations per year) is the quantile of
Y1 + Y2 exceeded once per T years on average.  Here the dependence parameter
is estimated from a short record, the margins are taken as known, and the
return-level curve is computed by simulation from the fitted model; the
spread across replicates is what the prediction study quantifies.
"""

import numpy as np

from mevlab import (
    SeedSpec,
    fit_estimator,
    return_levels,
    sample_study_data,
    select_threshold,
)

alpha_true = 0.6
periods = [1, 5, 20, 50]

true_curve = return_levels(alpha_true, periods, 500_000, SeedSpec(99, 1))
print("true return levels:",
      {r["period"]: round(r["level"], 2) for r in true_curve})

# three short records -> three fitted curves
for rep in range(3):
    data = sample_study_data(2000, 2, alpha_true, SeedSpec(99, 10 + rep))
    td = select_threshold(0.98, "marginal", data, margins="fit")
    alpha_hat = fit_estimator("thr4", td).x
    curve = return_levels(alpha_hat, periods, 500_000, SeedSpec(99, 1))
    print(f"replicate {rep}: alpha_hat = {alpha_hat:.3f} ->",
          {r["period"]: round(r["level"], 2) for r in curve})

print("\nthe common random stream (same SeedSpec) makes curves comparable:")
print("differences across replicates reflect estimation error alone.")
