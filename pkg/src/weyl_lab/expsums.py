"""Weyl sums, Hua-bound scans, Farey shells and major/minor arc scans.

Phases are reduced exactly before exponentiation.  For a rational frequency
``A/Q`` the phase of ``n^d`` is ``(A * (n^d mod Q) mod Q) / Q`` in integer
arithmetic.  A float frequency is an exact dyadic rational; it is split as
``hi / 2^64 + lo`` and ``hi * n^d`` is formed in wrapping uint64 arithmetic,
which is exactly ``2^64 * (hi / 2^64 * n^d mod 1)``.  The remainder
``lo < 2^-64`` only matters for tiny frequencies and is added in floating
point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import primes_upto, reduced_fractions
from .fits import DecayFit, fit_loglog
from .signals import RationalFreq

__all__ = [
    "DEFAULT_Q_CAP",
    "DEFAULT_ARC_EXPONENT",
    "WeylSumCapError",
    "WeylSumRecord",
    "HuaRow",
    "ArcDecomposition",
    "powmod_array",
    "complete_weyl_sum",
    "complete_weyl_sums",
    "normalized_weyl_sum",
    "normalized_weyl_sums",
    "weighted_phase_sums",
    "split_frequencies",
    "hua_scan",
    "enumerate_shell",
    "minor_arc_decay_scan",
]

DEFAULT_Q_CAP = 10**7
DEFAULT_ARC_EXPONENT = 0.2
_CHUNK = 1 << 18
_TWO64 = 1 << 64


class WeylSumCapError(ValueError):
    """Denominator above the configured cap."""


@dataclass(frozen=True)
class WeylSumRecord:
    d: int
    freq: RationalFreq
    value: complex


@dataclass(frozen=True)
class HuaRow:
    Q: int
    normalized_max: float  # max over reduced A of |S(A/Q)| * Q^(1/d)
    argmax_A: int


def powmod_array(n: np.ndarray, d: int, Q: int) -> np.ndarray:
    """``n^d mod Q`` elementwise in int64 (requires Q < 2^31)."""
    r = np.asarray(n, dtype=np.int64) % Q
    out = r.copy()
    for _ in range(d - 1):
        out = (out * r) % Q
    return out


def _check_cap(Q: int, cap: int):
    if Q > cap:
        raise WeylSumCapError(f"denominator {Q} exceeds cap {cap}")


def _phase_sum(num: np.ndarray, Q: int) -> complex:
    # sum of e(-num/Q), num integer in [0, Q)
    return complex(np.sum(np.exp(-2j * np.pi * (num / Q))))


def complete_weyl_sum(d: int, freq: RationalFreq, cap: int = DEFAULT_Q_CAP, cache=None) -> complex:
    """``S(A/Q) = (1/Q) sum_{n<=Q} e(-A n^d / Q)``."""
    if d < 2:
        raise ValueError("degree must be >= 2")
    A, Q = freq.A, freq.Q
    _check_cap(Q, cap)
    if cache is not None:
        hit = cache.get(d, A, Q)
        if hit is not None:
            return hit
    if A == 0:
        value = 1.0 + 0.0j
    else:
        total = 0.0j
        for start in range(1, Q + 1, _CHUNK):
            n = np.arange(start, min(start + _CHUNK, Q + 1), dtype=np.int64)
            num = (A * powmod_array(n, d, Q)) % Q
            total += _phase_sum(num, Q)
        value = total / Q
    if cache is not None:
        cache.put(d, A, Q, value)
    return value


def complete_weyl_sums(d: int, Q: int, cap: int = DEFAULT_Q_CAP) -> np.ndarray:
    """``S(A/Q)`` for every ``A = 0..Q-1`` (reduced or not) in one FFT.

    ``S(A/Q) = (1/Q) sum_m c_m e(-A m / Q)`` with ``c_m = #{n <= Q : n^d = m mod Q}``,
    which is the DFT of the residue counts.
    """
    _check_cap(Q, cap)
    counts = np.bincount(powmod_array(np.arange(1, Q + 1), d, Q), minlength=Q)
    return np.fft.fft(counts.astype(float)) / Q


def split_frequencies(betas) -> tuple[np.ndarray, np.ndarray]:
    """Write each ``beta mod 1`` exactly as ``hi / 2^64 + lo`` with uint64 ``hi``.

    ``lo`` is zero unless beta needs more than 64 fractional bits, in which
    case ``0 <= lo < 2^-64``.
    """
    betas = np.asarray(betas, dtype=float).reshape(-1)
    hi = np.empty(betas.shape, dtype=np.uint64)
    lo = np.empty(betas.shape, dtype=float)
    for i, b in enumerate(betas.tolist()):
        f = Fraction(b) % 1
        top = (f.numerator * _TWO64) // f.denominator
        hi[i] = top
        lo[i] = float(f - Fraction(top, _TWO64))
    return hi, lo


def weighted_phase_sums(betas, positions, weights) -> np.ndarray:
    """``sum_i w_i e(-beta * p_i)`` for each beta, with exact phase reduction.

    ``positions`` are nonnegative integers below 2^64.  The ``hi`` part of
    each frequency is multiplied in wrapping uint64 arithmetic, which is the
    exact product modulo 2^64; the sub-2^-64 ``lo`` part is added in floating
    point.
    """
    hi, lo = split_frequencies(betas)
    pos = np.asarray(positions)
    pos_u = pos.astype(np.uint64)
    pos_f = pos.astype(np.float64)
    w = np.asarray(weights, dtype=complex)
    w = np.broadcast_to(w, pos_u.shape)
    totals = np.zeros(hi.shape, dtype=complex)
    for start in range(0, len(pos_u), _CHUNK):
        pu = pos_u[start: start + _CHUNK]
        pf = pos_f[start: start + _CHUNK]
        ww = w[start: start + _CHUNK]
        rows = max(1, _CHUNK // len(pu))
        for i in range(0, len(hi), rows):
            with np.errstate(over="ignore"):
                prod = hi[i: i + rows, None] * pu[None, :]
            phase = prod.astype(np.float64) * (1.0 / _TWO64)
            if np.any(lo[i: i + rows]):
                phase = phase + lo[i: i + rows, None] * pf[None, :]
            totals[i: i + rows] += np.exp(-2j * np.pi * phase) @ ww
    return totals


def _powers(N: int, d: int) -> np.ndarray:
    """``n^d`` for n = 1..N as uint64 (wrapping modulo 2^64 when too large)."""
    base = np.arange(1, N + 1, dtype=np.uint64)
    out = base.copy()
    with np.errstate(over="ignore"):
        for _ in range(d - 1):
            out = out * base
    return out


def _weyl_rational(d: int, N: int, frac: Fraction) -> complex:
    A, Q = frac.numerator, frac.denominator
    total = 0.0j
    for start in range(1, N + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, N + 1), dtype=np.int64)
        num = (A * powmod_array(n, d, Q)) % Q
        total += _phase_sum(num, Q)
    return total


def normalized_weyl_sum(d: int, N: int, beta) -> complex:
    """``(1/N) sum_{n<=N} e(-beta n^d)``; beta may be float, Fraction or RationalFreq."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if isinstance(beta, RationalFreq):
        beta = beta.as_fraction()
    if isinstance(beta, Fraction):
        frac = beta % 1
        q = frac.denominator
        if q < (1 << 31):
            return _weyl_rational(d, N, frac) / N
        beta = float(frac)
    return complex(normalized_weyl_sums(d, N, [beta])[0])


def normalized_weyl_sums(d: int, N: int, betas) -> np.ndarray:
    """Vectorized :func:`normalized_weyl_sum` over float frequencies.

    When ``n^d`` exceeds 2^64 the wrapped uint64 power is still exact for the
    ``hi`` part of the phase; only the sub-2^-64 part uses the float power.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    pos = _powers(N, d)
    if float(N) ** d >= 2.0**64:
        # keep the float copy of n^d honest for the lo part
        hi, lo = split_frequencies(betas)
        if np.any(lo):
            pf = np.arange(1, N + 1, dtype=float) ** d
            return _split_sums(hi, lo, pos, pf) / N
    return weighted_phase_sums(betas, pos, 1.0) / N


def _split_sums(hi, lo, pos_u, pos_f) -> np.ndarray:
    totals = np.zeros(hi.shape, dtype=complex)
    for i in range(len(hi)):
        with np.errstate(over="ignore"):
            prod = hi[i] * pos_u
        phase = prod.astype(np.float64) / 2.0**64 + lo[i] * pos_f
        totals[i] = np.sum(np.exp(-2j * np.pi * phase))
    return totals


def hua_scan(d: int, Q_max: int, primes_only: bool = True, cap: int = DEFAULT_Q_CAP) -> list[HuaRow]:
    """Rows ``(Q, max_{(A,Q)=1} |S(A/Q)| Q^(1/d))`` sorted by Q.

    ``primes_only`` scans Q = 1 and the odd primes; Q = 2 is skipped because
    ``n^d = n mod 2`` makes S(1/2) vanish for every d.
    """
    if Q_max < 2:
        raise ValueError("Q_max must be >= 2")
    _check_cap(Q_max, cap)
    qs = [1] + ([p for p in primes_upto(Q_max) if p != 2] if primes_only else list(range(2, Q_max + 1)))
    rows = []
    for Q in qs:
        if Q == 1:
            rows.append(HuaRow(1, 1.0, 0))
            continue
        S = complete_weyl_sums(d, Q, cap)
        A = np.array([a for a in range(1, Q) if gcd(a, Q) == 1])
        mags = np.abs(S[A])
        j = int(np.argmax(mags))
        rows.append(HuaRow(Q, float(mags[j] * Q ** (1.0 / d)), int(A[j])))
    return rows


def enumerate_shell(s: int) -> list[RationalFreq]:
    """Reduced fractions with denominator in ``[2^(s-1), 2^s)``."""
    if s < 1:
        raise ValueError("s must be >= 1")
    return [RationalFreq(A, Q) for A, Q in reduced_fractions(1 << (s - 1), 1 << s)]


@dataclass(frozen=True)
class ArcDecomposition:
    """Major arcs ``|beta - A/Q| <= 1/(Q N^(d-c))`` for ``Q <= N^c``."""

    N: int
    c: float
    d: int
    centers: tuple
    halfwidths: tuple

    @classmethod
    def build(cls, N: int, c: float = DEFAULT_ARC_EXPONENT, d: int = 2) -> "ArcDecomposition":
        if not 0 < c < 1:
            raise ValueError("arc exponent c must lie in (0, 1)")
        q_max = int(np.floor(N ** c + 1e-9))
        fracs = sorted(reduced_fractions(1, q_max + 1), key=lambda aq: Fraction(*aq))
        centers = tuple(RationalFreq(A, Q) for A, Q in fracs)
        widths = tuple(1.0 / (Q * float(N) ** (d - c)) for _, Q in fracs)
        arcs = cls(N, c, d, centers, widths)
        arcs._check_disjoint()
        return arcs

    @property
    def q_max(self) -> int:
        return max(f.Q for f in self.centers)

    def _check_disjoint(self):
        pos = [float(f) for f in self.centers] + [1.0]
        hw = list(self.halfwidths) + [self.halfwidths[0]]
        for i in range(len(pos) - 1):
            if pos[i + 1] - pos[i] <= hw[i] + hw[i + 1]:
                raise ValueError(
                    f"major arcs overlap at N={self.N}, c={self.c}: "
                    f"{self.centers[i]} and {self.centers[(i + 1) % len(self.centers)]}"
                )

    def locate(self, betas) -> np.ndarray:
        """Index of the containing arc for each beta, or -1 on the minor arcs."""
        b = np.mod(np.asarray(betas, dtype=float), 1.0)
        pos = np.array([float(f) for f in self.centers] + [1.0])
        hw = np.array(list(self.halfwidths) + [self.halfwidths[0]])
        right = np.clip(np.searchsorted(pos, b, side="left"), 0, len(pos) - 1)
        left = np.clip(right - 1, 0, len(pos) - 1)
        out = np.full(b.shape, -1, dtype=int)
        n_arcs = len(self.centers)
        for idx in (left, right):
            hit = np.abs(b - pos[idx]) <= hw[idx]
            out = np.where(hit & (out < 0), idx % n_arcs, out)
        return out

    def contains(self, beta) -> bool:
        return bool(self.locate([beta])[0] >= 0)


def minor_arc_decay_scan(
    d: int,
    N_list,
    c: float = DEFAULT_ARC_EXPONENT,
    samples: int = 500,
    rng_seed: int = 0,
) -> DecayFit:
    """Sup of the normalized Weyl sum over random minor-arc frequencies, per N.

    Frequencies are drawn uniformly on [0, 1) and those landing in a major arc
    of ``ArcDecomposition.build(N, c, d)`` are rejected until ``samples``
    minor-arc points are kept.  Returns the log-log fit of the sup against N.
    """
    N_list = [int(N) for N in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing")
    if any(N < 2**8 for N in N_list):
        raise ValueError("every N must be >= 2^8")
    if not 0 < c < d / 2:
        raise ValueError("c must lie in (0, d/2)")
    if samples < 100:
        raise ValueError("samples must be >= 100")
    rng = np.random.default_rng(rng_seed)
    sups = []
    for N in N_list:
        arcs = ArcDecomposition.build(N, c, d)
        kept, drawn = [], 0
        while len(kept) < samples:
            batch = rng.random(samples)
            drawn += len(batch)
            kept.extend(batch[arcs.locate(batch) < 0].tolist())
            if drawn >= 100 * samples and len(kept) < 0.01 * drawn:
                raise ValueError(f"rejection rate above 99% at N={N}; arcs cover too much")
        betas = np.array(kept[:samples])
        sups.append(float(np.max(np.abs(normalized_weyl_sums(d, N, betas)))))
    return fit_loglog(N_list, sups)
