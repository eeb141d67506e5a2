"""Information per observation and the root relative-efficiency table.

The censored estimator's information comes from exact quadrature over its
four censoring cells; block-maximum information is a Monte Carlo score
variance under the exact limiting model; the uncensored point-process
estimators are measured by replicated fitting.  Everything is reported as
100 sqrt(i / i_censored), the convention of the published comparison.
"""

import time

from mevlab import AreConfig, SeedSpec, are_table, info_block_max, info_censored

t0 = time.time()
for alpha in (0.3, 0.5, 0.7):
    r = info_censored(alpha, 0.95, "thr4")
    print(f"censored info per observation, alpha={alpha}: {r.info_per_obs:.4f}")

r = info_block_max(0.5, 100, "max2", mc=100_000, seed=SeedSpec(42))
print(f"\noccurrence-time block-maximum info (alpha=0.5, L=100): "
      f"{r.info_per_obs:.5f} +- {r.mc_stderr:.5f}")

# a small slice of the efficiency table; the full grid is
#   mevlab are --alphas 0.1:0.9:0.1 --p 0.95,0.99 --L 100 --seed 1 --out t.csv
config = AreConfig(estimators=("max1", "max2", "thr4", "thr5"),
                   mc_scores=100_000, seed=3)
rows = are_table([0.1, 0.5, 0.9], [0.95], config)
print(f"\nroot efficiencies vs the censored estimator (p=0.95, L=100):")
print(f"{'estimator':10s} {'alpha':>6s} {'percent':>8s}")
for cell in rows:
    print(f"{cell.estimator:10s} {cell.alpha:6.1f} {cell.root_are_percent:8.1f}")
print(f"\n[{time.time() - t0:.0f}s] block maxima discard most of each block:")
print("L=100 costs roughly a factor sqrt(i_thr4/i_max1) ~ 2-5 in standard error.")
