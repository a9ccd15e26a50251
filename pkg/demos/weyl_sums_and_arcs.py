"""Where are Weyl sums large?

Walk through complete sums at rationals, the square-root law for d=2,
and the decay of the normalized sum away from small denominators.
Run with ``python demos/weyl_sums_and_arcs.py``.
"""
# %%
import numpy as np

from weyl_lab import RationalFreq
from weyl_lab.expsums import (ArcDecomposition, complete_weyl_sum, hua_scan,
                              minor_arc_decay_scan, normalized_weyl_sums)

# %% [markdown]
# Complete sums S(A/Q) are averages of e(-A n^2 / Q) over one period.  For
# odd prime Q their modulus is exactly Q^(-1/2).

# %%
for A, Q in [(1, 3), (2, 5), (1, 7), (3, 11)]:
    s = complete_weyl_sum(2, RationalFreq(A, Q))
    print(f"S({A}/{Q}) = {s:.6f}   |S| sqrt(Q) = {abs(s) * Q**0.5:.12f}")

# even Q behaves differently; S(1/2) vanishes for every d
print("S(1/2) =", abs(complete_weyl_sum(2, RationalFreq(1, 2))))

# %%
rows = hua_scan(3, 200)
worst = max(rows, key=lambda r: r.normalized_max)
print(f"cubic sums: max |S| Q^(1/3) over primes <= 200 is {worst.normalized_max:.4f} at Q={worst.Q}")

# %% [markdown]
# The finite sum W_N(beta) = N^-1 sum e(-beta n^2) is large near rationals
# with small denominator and small elsewhere.  Sample a fine grid and
# compare on and off the major arcs.

# %%
N = 2**12
beta = np.arange(1 << 16) / (1 << 16)
W = np.abs(normalized_weyl_sums(2, N, beta))
arcs = ArcDecomposition.build(N, 0.2, 2)
on = np.array([arcs.contains(b) for b in beta])
print(f"N={N}: sup on arcs {W[on].max():.3f}, sup off arcs {W[~on].max():.3f}")
print("largest off-arc values sit near", beta[~on][np.argsort(W[~on])[-3:]])

# %%
fit = minor_arc_decay_scan(2, [2**e for e in range(8, 15)], samples=500)
for n, y in zip(fit.x, fit.y):
    print(f"N=2^{int(np.log2(n)):>2}  minor-arc sup {y:.4f}")
print(f"fitted log-log slope {fit.slope:.3f}")
