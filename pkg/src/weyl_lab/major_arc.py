"""Major-arc approximation of the smooth polynomial averages.

Near a rational ``A/Q`` with small ``Q`` the multiplier of ``K_k'`` factors
as ``S(A/Q)`` times a continuous oscillatory integral.  Gluing these local
pictures with the cutoff ``chi^`` gives ``L_k'``; this module builds it,
splits it into denominator shells, and measures how far it is from
``K_k'`` on the frequency side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import reduced_fractions
from .expsums import DEFAULT_ARC_EXPONENT, complete_weyl_sum, enumerate_shell
from .kernels import DEFAULT_BUDGET_BYTES, MemoryBudgetError, build_kernel, kernel_multiplier
from .signals import CyclicSignal, GridSignal, RationalFreq, chi_hat, phi_profile

__all__ = [
    "ArcTerm",
    "MajorArcApproximant",
    "k_min",
    "q_bound",
    "pi_multiplier",
    "build_approximant",
    "shell_operator",
    "phi_prime",
    "phi_prime_hat",
    "multiplier_error",
    "residual_maximal_bound",
    "ArcOverlapError",
]

_GL_ORDER = 8
_CLUSTER_NODES = 64


class ArcOverlapError(ValueError):
    pass


def q_bound(k: int, c: float) -> int:
    """Largest admissible denominator, ``floor(2^(ck))``."""
    return int(math.floor(2.0 ** (c * k) + 1e-9))


def k_min(c: float, d: int) -> int:
    """Smallest k with ``2^(ck+1) < 2^((d-c)k)``."""
    if not 0 < c < d / 2:
        raise ValueError("need 0 < c < d/2")
    k = 1
    while not c * k + 1 < (d - c) * k:
        k += 1
    return k


def _half_width(d: int, k: int, c: float) -> float:
    return 0.5 * 2.0 ** (-(d - c) * k)


def _check_disjoint(d: int, k: int, c: float):
    if k < k_min(c, d):
        raise ArcOverlapError(f"k={k} is below k_min={k_min(c, d)} for c={c}, d={d}")
    Q = q_bound(k, c)
    # distinct fractions with denominators <= Q are >= 1/(Q(Q-1)) apart
    gap = 1.0 / (Q * max(Q - 1, 1))
    if 2 * _half_width(d, k, c) >= gap:
        raise ArcOverlapError(f"arcs of width {2 * _half_width(d, k, c):.3g} overlap "
                              f"(fraction gap {gap:.3g})")


def _centered(beta: np.ndarray, center: float) -> np.ndarray:
    """``beta - center`` reduced to [-1/2, 1/2)."""
    return (beta - center + 0.5) % 1.0 - 0.5


def pi_multiplier(d: int, k: int, c: float, beta) -> np.ndarray | float:
    """Sum of the arc cutoffs ``chi^(2^((d-c)k)(beta - A/Q))`` over ``Q <= 2^(ck)``."""
    _check_disjoint(d, k, c)
    b = np.asarray(beta, dtype=float)
    scale = 2.0 ** ((d - c) * k)
    out = np.zeros(b.shape)
    for A, Q in reduced_fractions(1, q_bound(k, c) + 1):
        out += chi_hat(scale * _centered(b, A / Q))
    return out if out.ndim else float(out)


def phi_prime(s, d: int) -> np.ndarray:
    """Pushforward density of ``phi`` under ``t -> t^d``: ``phi(s^(1/d)) / (d s^(1-1/d))``."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    pos = s > 0
    out[pos] = phi_profile(s[pos] ** (1.0 / d)) / (d * s[pos] ** (1.0 - 1.0 / d))
    return out


def phi_prime_hat(eta, d: int) -> np.ndarray:
    """``int phi'(s) e(-eta s) ds = int phi(t) e(-eta t^d) dt``, vectorized in eta."""
    eta = np.asarray(eta, dtype=float)
    flat = eta.ravel()
    cycles = (float(np.max(np.abs(flat))) if flat.size else 0.0) * (4.0**d - 0.5**d)
    panels = max(128, int(np.ceil(10 * cycles)))
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(0.5, 4.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel() * phi_profile(t)
    td = t**d
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, (1 << 22) // t.size)
    for i in range(0, flat.size, step):
        out[i: i + step] = np.exp(-2j * np.pi * flat[i: i + step, None] * td[None, :]) @ wt
    return out.reshape(eta.shape)


@dataclass(frozen=True)
class ArcTerm:
    freq: RationalFreq
    weight: complex


@dataclass(frozen=True)
class MajorArcApproximant:
    """``L_k'``: one term ``S(A/Q) Mod_{A/Q}(chi_{(d-c)k} * phi'_{dk})`` per fraction.

    Terms whose Weyl weight vanishes (e.g. ``Q = 2`` for ``d = 2``) are kept
    with weight 0 so the term list is exactly the set of admissible fractions.
    """

    d: int
    k: int
    c: float
    terms: tuple

    @property
    def half_width(self) -> float:
        return _half_width(self.d, self.k, self.c)

    @property
    def denominators(self) -> list[int]:
        return sorted({t.freq.Q for t in self.terms})

    def multiplier(self, betas) -> np.ndarray:
        """``L_k'^(beta)``; each beta sees at most one term by disjointness."""
        b = np.asarray(betas, dtype=float)
        flat = b.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        cut_scale = 2.0 ** ((self.d - self.c) * self.k)
        dil = 2.0 ** (self.d * self.k)
        for term in self.terms:
            if term.weight == 0:
                continue
            eta = _centered(flat, float(term.freq))
            near = np.abs(eta) < self.half_width
            if not near.any():
                continue
            e = eta[near]
            out[near] += term.weight * chi_hat(cut_scale * e) * phi_prime_hat(dil * e, self.d)
        return out.reshape(b.shape)


def build_approximant(d: int, k: int, c: float = DEFAULT_ARC_EXPONENT,
                      cache=None) -> MajorArcApproximant:
    _check_disjoint(d, k, c)
    terms = tuple(ArcTerm(RationalFreq(A, Q), complete_weyl_sum(d, RationalFreq(A, Q), cache=cache))
                  for A, Q in reduced_fractions(1, q_bound(k, c) + 1))
    return MajorArcApproximant(d, k, c, terms)


def shell_operator(d: int, k: int, s: int, c: float = DEFAULT_ARC_EXPONENT,
                   cache=None) -> MajorArcApproximant:
    """The terms of :func:`build_approximant` with ``2^(s-1) <= Q < 2^s``.

    Admissible shells are those that can meet ``Q <= 2^(ck)``, i.e.
    ``1 <= s <= floor(ck) + 1``.
    """
    _check_disjoint(d, k, c)
    if s < 1 or 2 ** (s - 1) > q_bound(k, c):
        raise ValueError(f"shell s={s} holds no admissible denominators at k={k}, c={c}")
    Qmax = q_bound(k, c)
    terms = tuple(ArcTerm(f, complete_weyl_sum(d, f, cache=cache))
                  for f in enumerate_shell(s) if f.Q <= Qmax)
    return MajorArcApproximant(d, k, c, terms)


def _arc_grid_indices(approx: MajorArcApproximant, M: int) -> np.ndarray:
    """Grid indices j with ``j/M`` inside the support of some arc term."""
    w = approx.half_width
    idx = []
    for term in approx.terms:
        a = float(term.freq)
        lo = math.ceil((a - w) * M)
        hi = math.floor((a + w) * M)
        idx.append(np.arange(lo, hi + 1) % M)
    return np.unique(np.concatenate(idx)) if idx else np.zeros(0, dtype=np.int64)


def _cluster_nodes(approx: MajorArcApproximant, count: int) -> np.ndarray:
    w = approx.half_width
    side = np.geomspace(1e-4, 1.0, count // 2, endpoint=False) * w
    offsets = np.concatenate([-side[::-1], side])
    return np.concatenate([(float(t.freq) + offsets) % 1.0 for t in approx.terms])


def multiplier_error(d: int, k: int, c: float = DEFAULT_ARC_EXPONENT, refine: int = 0,
                     grid_exponent: int | None = None, cluster_nodes: int = _CLUSTER_NODES,
                     chunk_exponent: int = 20, cache=None) -> float:
    """``sup |K_k'^ - L_k'^|`` over a hybrid frequency grid.

    The uniform part has step ``2^-(dk+3+refine)`` (or ``2^-grid_exponent``
    when given, which must be at least ``dk+3``).  Off the arcs the
    approximant vanishes, so the uniform sup there is the sup of
    ``|K_k'^|``; it is computed by splitting the grid into residue classes
    and running one folded FFT per class.  Inside the arcs both multipliers
    are evaluated directly, together with ``cluster_nodes`` extra points per
    arc packed geometrically toward the center.
    """
    approx = build_approximant(d, k, c, cache=cache)
    E = d * k + 3 + refine if grid_exponent is None else grid_exponent
    if E < d * k + 3:
        raise ValueError(f"grid step 2^-{E} is coarser than 2^-{d * k + 3}")
    K = build_kernel(d, k, smooth=True)
    M = 1 << E
    sub = 1 << min(E, chunk_exponent)
    B = M // sub
    if 16 * sub > DEFAULT_BUDGET_BYTES:
        raise MemoryBudgetError("FFT chunk exceeds the memory budget")

    arc_idx = _arc_grid_indices(approx, M)
    pos = K.positions % M
    folded = pos % sub
    off_sup = 0.0
    for r in range(B):
        phase = ((r * pos) % M) / M
        g = np.bincount(folded, weights=K.weights * np.cos(2 * np.pi * phase), minlength=sub) \
            - 1j * np.bincount(folded, weights=K.weights * np.sin(2 * np.pi * phase), minlength=sub)
        vals = np.abs(np.fft.fft(g))
        mine = arc_idx[arc_idx % B == r] // B
        vals[mine] = 0.0
        off_sup = max(off_sup, float(vals.max()))

    betas = np.concatenate([arc_idx / M, _cluster_nodes(approx, cluster_nodes)])
    diff = np.abs(kernel_multiplier(K, betas) - approx.multiplier(betas))
    return max(off_sup, float(diff.max()) if diff.size else 0.0)


def _as_cyclic(f, M: int) -> np.ndarray:
    if isinstance(f, CyclicSignal):
        if f.modulus != M:
            raise ValueError("modulus mismatch")
        return np.asarray(f.values)
    if isinstance(f, GridSignal):
        out = np.zeros(M, dtype=complex)
        np.add.at(out, f.indices % M, f.values)
        return out
    return np.asarray(f, dtype=complex)


def residual_maximal_bound(d: int, c: float, k_range, f, M: int = 1 << 14,
                           cache=None) -> float:
    """Ratio of ``||sup_k |(K_k' - L_k') f|||^2`` to ``sup_beta sum_k |m_k|^2 ||f||^2``.

    Everything lives on Z_M, where both multipliers are sampled at ``j/M``
    (the kernel's atoms are folded mod M).  Returns 0 for ``f = 0``.
    """
    ks = list(k_range)
    if not ks:
        raise ValueError("k_range must be nonempty")
    if 16 * M * (len(ks) + 2) > DEFAULT_BUDGET_BYTES:
        raise MemoryBudgetError("cyclic embedding exceeds the memory budget")
    vals = _as_cyclic(f, M)
    F = np.fft.fft(vals)
    grid = np.arange(M) / M
    best = np.zeros(M)
    square = np.zeros(M)
    for k in ks:
        K = build_kernel(d, k, smooth=True)
        dense = np.bincount(K.positions % M, weights=K.weights, minlength=M)
        m = np.fft.fft(dense) - build_approximant(d, k, c, cache=cache).multiplier(grid)
        square += np.abs(m) ** 2
        np.maximum(best, np.abs(np.fft.ifft(m * F)), out=best)
    lhs = float(np.sum(best**2))
    rhs = float(square.max() * np.sum(np.abs(vals) ** 2))
    if rhs == 0:
        return 0.0
    return lhs / rhs
