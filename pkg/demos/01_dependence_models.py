"""Logistic dependence models: exponent functions and their derivatives.

A multivariate extreme-value distribution on the unit Frechet scale is
G(z) = exp(-V(z)); V is homogeneous of order -1 and pins the margins through
V(inf, ..., z, ..., inf) = 1/z.  This walk-through evaluates the logistic
family, its asymmetric extension, and the partial derivatives that every
likelihood in the package is built from.
"""

import numpy as np

from mevlab import (
    AsymLogisticParams,
    LogisticParams,
    alpha_derivs_bivariate,
    coarsen_by_one,
    enumerate_partitions,
    ev_density_logistic,
    exponent_asym_logistic,
    exponent_logistic,
    partial_deriv_logistic,
)

# the dependence parameter interpolates between complete dependence
# (alpha -> 0, V(1,1) -> 1) and independence (alpha = 1, V(1,1) = 2)
for alpha in (0.1, 0.5, 0.9, 1.0):
    V = exponent_logistic([1.0, 1.0], LogisticParams(alpha))
    print(f"alpha={alpha:.1f}: extremal coefficient V(1,1) = {V:.4f}")

# homogeneity: scaling the point scales V inversely
p = LogisticParams(0.5)
z = np.array([0.8, 2.5, 1.1])
print("\nV(z)      =", exponent_logistic(z, p))
print("2 V(2z)   =", 2 * exponent_logistic(2 * z, p))

# mixed partial derivatives in closed form; the density of G stacks them
# over all set partitions of the coordinates
V1 = partial_deriv_logistic(z, p, {0})
V123 = partial_deriv_logistic(z, p, {0, 1, 2})
print("\ndV/dz1          =", V1)
print("d3V/dz1dz2dz3   =", V123)
print("density at z    =", ev_density_logistic(z, p))
print("Bell(3) partitions:", len(enumerate_partitions(3)))
print("coarsenings of {{0},{1},{2}}:",
      [q.blocks for q in coarsen_by_one(enumerate_partitions(3)[0])])

# all nine bivariate derivatives (coordinates and dependence parameter) feed
# the information quadratures
d = alpha_derivs_bivariate([1.0, 2.0], LogisticParams(0.6))
print("\nbivariate derivative bundle at (1, 2), alpha = 0.6:")
for name in ("V", "V1", "V2", "V12", "Va", "Vaa", "V1a", "V2a", "V12a"):
    print(f"  {name:5s} = {getattr(d, name):+.6f}")

# the asymmetric extension spreads mass over coordinate subsets; with all
# mass on the full set it reduces to the symmetric model exactly
sym = AsymLogisticParams.logistic_embedding(2, 0.5)
both = frozenset({0, 1})
mixed = AsymLogisticParams(
    2,
    {both: 0.5},
    {(both, 0): 0.5, (both, 1): 0.5,
     (frozenset({0}), 0): 0.5, (frozenset({1}), 1): 0.5},
)
print("\nasymmetric, embedded symmetric:",
      exponent_asym_logistic([1.0, 1.0], sym))
print("asymmetric, half mass on singletons:",
      exponent_asym_logistic([1.0, 1.0], mixed))
