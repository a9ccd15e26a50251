"""Polynomial averages, their multipliers, and the major-arc model.

Builds K_k, checks its transform against Weyl sums, applies the maximal
operator to a delta, and looks at how well the arc approximant tracks the
smooth average's multiplier.
"""
# %%
import numpy as np

from weyl_lab import GridSignal
from weyl_lab.expsums import normalized_weyl_sums
from weyl_lab.kernels import build_kernel, convolve, evaluate_vk, kernel_multiplier, maximal_operator
from weyl_lab.major_arc import build_approximant, multiplier_error, shell_operator

# %%
K = build_kernel(2, 3)
print("K_3 atoms:", K.atoms)
betas = np.linspace(0, 1, 7, endpoint=False)
print("multiplier vs Weyl sum:",
      np.max(np.abs(kernel_multiplier(K, betas) - normalized_weyl_sums(2, 8, betas))))

# %% [markdown]
# Averaging a delta along squares spreads it to the points n^2.  The
# maximal function over dyadic lengths keeps the largest of these.

# %%
delta = GridSignal.delta()
print("K_2 * delta:", convolve(build_kernel(2, 2), delta).trim())
M = maximal_operator(2, 5, delta)
print("sup_k |K_k delta| at 1, 4, 9, 16:", [round(M.at(x).real, 4) for x in (1, 4, 9, 16)])

# %% [markdown]
# The continuous piece: V_k decays like lambda^(-1/2) once the phase
# turns over many times.

# %%
for lam in (0.1, 10, 100, 1000):
    v = evaluate_vk(2, 4, lam / 2**8)
    print(f"lambda={lam:>6}: |V_k| = {abs(v):.4f}, |V_k| lambda^(1/2) = {abs(v) * lam**0.5:.4f}")

# %%
approx = build_approximant(2, 10, 0.2)
print("approximant terms:", [(str(t.freq), round(abs(t.weight), 4)) for t in approx.terms])
for s in (1, 2, 3):
    shell = shell_operator(2, 10, s, 0.2)
    print(f"shell {s}: denominators {shell.denominators}")

# %% [markdown]
# The sup error does not go to zero along k: the worst frequencies are
# rationals whose denominator has just left the admissible range, where
# the smooth average still equals roughly |S(A/Q)| times its mass.

# %%
for k in range(6, 11):
    print(f"k={k:>2}: sup |K' - L'| = {multiplier_error(2, k, 0.2):.4f}")
