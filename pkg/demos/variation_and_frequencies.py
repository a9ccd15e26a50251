"""Jumps, variation and the multi-frequency maximal function."""
# %%
import math

import numpy as np

from weyl_lab.multifreq import log2N_experiment
from weyl_lab.variation import (SampledPath, entropy_covering, jump_count, lepingle_check,
                                r_variation)

# %% [markdown]
# A random walk path: count greedy jumps at a few altitudes and compare
# with the r-variation bound lambda N^(1/r) <= V^r.

# %%
rng = np.random.default_rng(1)
path = SampledPath.of(np.cumsum(rng.standard_normal(200)) / 10)
V = r_variation(path, 3)
print(f"V^3 = {V:.4f}")
for lam in (0.05, 0.2, 0.5, 1.0):
    N = jump_count(path, lam).count
    cover = entropy_covering(path, round(-math.log2(lam)))
    print(f"lambda={lam:<5} jumps {N:>4}  lambda N^(1/3) = {lam * N ** (1 / 3):.4f}"
          f"  covering size {len(cover)} ({'exact' if cover.exact else 'greedy'})")

# %% [markdown]
# Martingale variation across dyadic scales.  The raw ratio stays near 1
# for every r, so dividing by r/(r-2) mostly tracks that factor.

# %%
for r in (2.1, 2.5, 4.0, 10.0):
    q = lepingle_check("martingale", 50, 12, r, rng_seed=3)
    print(f"r={r:<4}  ||V^r|| / (r/(r-2) ||f||) = {q:.3f}   raw = {q * r / (r - 2):.3f}")

# %%
rows, fit = log2N_experiment([1, 2, 4, 8, 16], trials=10, rng_seed=0)
for row in rows:
    print(row.as_dict())
print("slope against 1 + log2^2 N:", None if fit is None else round(fit.slope, 3))
