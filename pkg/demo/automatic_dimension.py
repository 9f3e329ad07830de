"""How the feature dimension is chosen from the spectrum.

Generates five orthogonal 4-dimensional subspaces, then shows that the
trade-off parameter selects exactly the 20 meaningful singular values, and
that the chosen dimension only grows as the parameter grows.
"""

import numpy as np

import pce

spec = pce.SubspaceSpec(ambient=50, subspaces=((4, 20),) * 5)
ds = pce.generate_union_of_subspaces(spec, seed=0)
svd = pce.skinny_svd(ds.matrix)

print("rank of the clean union:", svd.rank)
print("top singular values:", np.round(svd.sigma[:6], 3))

lam = 2.0 / svd.sigma[-1] ** 2
print(f"\nwith lambda={lam:.3f} (threshold rule):")
print("  estimated dimension k =", pce.estimate_dimension(svd.sigma, lam))

print("\nk is nondecreasing in lambda:")
for lam in (0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0):
    print(f"  lambda={lam:>6}: k={pce.estimate_dimension(svd.sigma, lam)}")
