"""Numerics for polynomial ergodic averages: Weyl sums, major-arc
approximation, discrete maximal and variational operators, and the
multi-frequency maximal operator."""
from .expsums import (ArcDecomposition, complete_weyl_sum, enumerate_shell, hua_scan,
                      minor_arc_decay_scan, normalized_weyl_sum)
from .fits import DecayFit
from .kernels import build_kernel, convolve, evaluate_vk, hl_maximal, maximal_operator
from .major_arc import build_approximant, multiplier_error, pi_multiplier, shell_operator
from .signals import (CyclicSignal, GridSignal, RationalFreq, ScaleFamily, dft, idft,
                      l2_norm, make_cutoff)
from .variation import SampledPath, entropy_covering, jump_count, r_variation

__version__ = "0.1.0"
