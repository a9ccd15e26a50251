"""Multi-frequency smoothing operators on a cyclic model of the line.

The line is replaced by ``Z_M`` with sample spacing ``h = 1/samples_per_unit``,
so the domain has length ``L = M h`` units and the frequency grid has step
``1/L``.  A frequency set is a list of integer bins; ``theta = bin / L``.
Bins are 1-separated when their frequencies differ by more than one unit.

``Xi_k`` keeps the band ``chi^(2^k (xi - theta_n))`` around each frequency.
Only even scales ``k >= k_floor`` with ``2^k <= L/8`` are used, so that
every band is resolved by at least eight frequency bins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fits import DecayFit, fit_loglog
from .signals import CyclicSignal, chi_hat

__all__ = [
    "FrequencySet",
    "MultiFreqState",
    "random_frequency_set",
    "default_scales",
    "truncation_floor",
    "xi_multiplier",
    "xi_operator",
    "xi_operator_physical",
    "vector_maximal_F",
    "multifreq_maximal",
    "band_overlap",
    "small_scale_bound",
    "local_orthogonality_check",
    "cyclic_hl_maximal",
    "smoothness_check_F",
    "log2N_experiment",
    "band_limited_noise",
    "Log2NRow",
    "DEFAULT_MODULUS",
    "DEFAULT_SAMPLES_PER_UNIT",
    "DEFAULT_K_FLOOR",
    "F_RATIO_CONSTANT",
    "ORTHOGONALITY_CONSTANT",
]

DEFAULT_MODULUS = 1 << 16
DEFAULT_SAMPLES_PER_UNIT = 64
DEFAULT_K_FLOOR = 3
# recorded constants
F_RATIO_CONSTANT = 3.0
ORTHOGONALITY_CONSTANT = 2.0
MIN_INTERVAL = 1.0


@dataclass(frozen=True)
class FrequencySet:
    """Grid-aligned frequencies ``bins / length`` with pairwise gaps > 1."""

    bins: tuple
    length: float  # domain length L in units

    def __post_init__(self):
        b = tuple(sorted(int(x) for x in self.bins))
        object.__setattr__(self, "bins", b)
        th = np.array(b) / self.length
        if len(th) > 1 and np.min(np.diff(th)) <= 1.0:
            raise ValueError("frequencies must be 1-separated")

    @classmethod
    def from_thetas(cls, thetas, length: float) -> "FrequencySet":
        thetas = np.asarray(thetas, dtype=float)
        bins = np.rint(thetas * length)
        if np.max(np.abs(bins - thetas * length), initial=0.0) > 1e-9:
            raise ValueError("frequencies are not aligned to the grid")
        return cls(tuple(bins.astype(int)), length)

    @property
    def thetas(self) -> np.ndarray:
        return np.array(self.bins) / self.length

    def __len__(self) -> int:
        return len(self.bins)


def random_frequency_set(N: int, M: int, samples_per_unit: int, rng,
                         max_tries: int = 100_000) -> FrequencySet:
    """Rejection-sample N grid frequencies, pairwise more than 1 apart.

    Frequencies stay at least one unit inside the Nyquist limit so every
    band of half-width 1/2 fits on the grid.
    """
    L = M / samples_per_unit
    limit = int(math.floor((samples_per_unit / 2 - 1) * L))
    gap = int(math.floor(L)) + 1
    chosen: list[int] = []
    for _ in range(max_tries):
        if len(chosen) == N:
            break
        b = int(rng.integers(-limit, limit + 1))
        if all(abs(b - c) >= gap for c in chosen):
            chosen.append(b)
    if len(chosen) < N:
        raise RuntimeError(f"could not place {N} separated frequencies")
    return FrequencySet(tuple(chosen), L)


def default_scales(M: int, samples_per_unit: int = DEFAULT_SAMPLES_PER_UNIT,
                   k_floor: int = DEFAULT_K_FLOOR) -> list[int]:
    """Even k >= k_floor with 2^k <= L/8."""
    L = M / samples_per_unit
    return [k for k in range(k_floor, 64) if k % 2 == 0 and 2.0**k <= L / 8]


def truncation_floor(N: int, scales, c: float = 1.0) -> list[int]:
    """Scales with ``k >= c log2(N)^2``, keeping at least the largest one."""
    floor = c * math.log2(max(N, 1)) ** 2
    kept = [k for k in scales if k >= floor]
    return kept if kept else [max(scales)]


@dataclass(frozen=True, eq=False)
class MultiFreqState:
    theta: FrequencySet
    f: CyclicSignal
    samples_per_unit: int = DEFAULT_SAMPLES_PER_UNIT

    def __post_init__(self):
        L = self.f.modulus / self.samples_per_unit
        if abs(L - self.theta.length) > 1e-12:
            raise ValueError("frequency set and signal disagree on the domain length")

    @property
    def M(self) -> int:
        return self.f.modulus

    @property
    def h(self) -> float:
        return 1.0 / self.samples_per_unit

    @cached_property
    def freqs(self) -> np.ndarray:
        return np.fft.fftfreq(self.M, d=self.h)

    @cached_property
    def spectrum(self) -> np.ndarray:
        return np.fft.fft(self.f.values)

    def modulation(self, b: int) -> np.ndarray:
        """``e(theta x)`` on the grid for ``theta = b / L``, reduced exactly."""
        m = np.arange(self.M, dtype=np.int64)
        return np.exp(2j * np.pi * ((b * m) % self.M) / self.M)

    @cached_property
    def bandpieces(self) -> np.ndarray:
        """``f_theta = chi * (Mod_{-theta} f)`` for every frequency, shape (N, M)."""
        out = []
        for b in self.theta.bins:
            g = self.f.values * np.conj(self.modulation(b))
            out.append(np.fft.ifft(np.fft.fft(g) * chi_hat(self.freqs)))
        return np.array(out)


def xi_multiplier(state: MultiFreqState, k: int) -> np.ndarray:
    """``sum_n chi^(2^k (xi - theta_n))`` on the frequency grid."""
    if 2.0**k > state.theta.length / 8:
        raise ValueError(f"scale 2^{k} is not resolved on a domain of length {state.theta.length}")
    out = np.zeros(state.M)
    for th in state.theta.thetas:
        out += chi_hat(2.0**k * (state.freqs - th))
    return out


def _check_scale(k: int, k_floor: int = DEFAULT_K_FLOOR):
    if k < k_floor:
        raise ValueError(f"scale k={k} is below the floor {k_floor}")


def xi_operator(state: MultiFreqState, k: int, k_floor: int = DEFAULT_K_FLOOR) -> CyclicSignal:
    _check_scale(k, k_floor)
    return CyclicSignal(np.fft.ifft(xi_multiplier(state, k) * state.spectrum))


def _chi_k_periodic(state: MultiFreqState, k: int) -> np.ndarray:
    # samples of the periodized chi_k times h; exact because chi^_k is band-limited
    return np.fft.ifft(chi_hat(2.0**k * state.freqs))


def xi_operator_physical(state: MultiFreqState, k: int,
                         k_floor: int = DEFAULT_K_FLOOR) -> CyclicSignal:
    """``sum_n e(theta_n x) (chi_k * f_theta_n)(x)``, assembled per frequency."""
    _check_scale(k, k_floor)
    kern_hat = np.fft.fft(_chi_k_periodic(state, k))
    out = np.zeros(state.M, dtype=complex)
    for b, piece in zip(state.theta.bins, state.bandpieces):
        smoothed = np.fft.ifft(np.fft.fft(piece) * kern_hat)
        out += state.modulation(b) * smoothed
    return CyclicSignal(out)


def _scale_list(state: MultiFreqState, scales, k_floor: int) -> list[int]:
    ks = list(scales) if scales is not None else default_scales(state.M, state.samples_per_unit, k_floor)
    if not ks:
        raise ValueError("no admissible scales")
    for k in ks:
        _check_scale(k, k_floor)
    return ks


def vector_maximal_F(state: MultiFreqState, k_floor: int = DEFAULT_K_FLOOR,
                     scales=None) -> np.ndarray:
    """``F(x) = (sum_n sup_k |chi_k * f_theta_n (x)|^2)^(1/2)``."""
    ks = _scale_list(state, scales, k_floor)
    P = np.fft.fft(state.bandpieces, axis=1)
    total = np.zeros(state.M)
    for row in P:
        best = np.zeros(state.M)
        for k in ks:
            np.maximum(best, np.abs(np.fft.ifft(row * chi_hat(2.0**k * state.freqs))), out=best)
        total += best**2
    return np.sqrt(total)


def multifreq_maximal(state: MultiFreqState, scales=None,
                      k_floor: int = DEFAULT_K_FLOOR) -> np.ndarray:
    """``sup_k |Xi_k f|`` over the scale list."""
    ks = _scale_list(state, scales, k_floor)
    best = np.zeros(state.M)
    for k in ks:
        np.maximum(best, np.abs(xi_operator(state, k, k_floor).values), out=best)
    return best


def band_overlap(state: MultiFreqState) -> float:
    """``sup_xi sum_n |chi^(xi - theta_n)|^2``; at most 1 for separated sets."""
    total = np.zeros(state.M)
    for th in state.theta.thetas:
        total += chi_hat(state.freqs - th) ** 2
    return float(total.max())


def small_scale_bound(state: MultiFreqState, scales,
                      k_floor: int = DEFAULT_K_FLOOR) -> tuple[float, float, float]:
    """``(||sup_k |Xi_k f|||, sqrt(K) max_k ||Xi_k f||, sqrt(K) ||f||)``."""
    ks = _scale_list(state, scales, k_floor)
    norms = [np.linalg.norm(xi_operator(state, k, k_floor).values) for k in ks]
    root = math.sqrt(len(ks))
    lhs = float(np.linalg.norm(multifreq_maximal(state, ks, k_floor)))
    return lhs, root * float(max(norms)), root * float(np.linalg.norm(state.f.values))


def local_orthogonality_check(thetas, coefficients, interval: tuple[float, float],
                              nodes_per_cycle: int = 16) -> float:
    """``int_I |sum a_n e(theta_n x)|^2 dx / (sum |a_n|^2 |I|)`` by Gauss-Legendre."""
    a, b = interval
    length = b - a
    if length < MIN_INTERVAL:
        raise ValueError(f"interval of length {length} is below the floor {MIN_INTERVAL}")
    th = np.asarray(thetas, dtype=float)
    c = np.asarray(coefficients, dtype=complex)
    mass = float(np.sum(np.abs(c) ** 2))
    if mass == 0:
        return 0.0
    spread = (np.ptp(th) if th.size else 0.0) * length
    panels = max(64, int(math.ceil(nodes_per_cycle * spread / 8)))
    x, w = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x).ravel()
    wt = (half[:, None] * w).ravel()
    vals = np.exp(2j * np.pi * np.outer(t, th)) @ c
    return float(np.sum(wt * np.abs(vals) ** 2) / (mass * length))


def cyclic_hl_maximal(values: np.ndarray, radii=None) -> np.ndarray:
    """Centered maximal average of ``|f|`` on Z_M over radii 0, 1, 2, 4, ..., < M/2."""
    a = np.abs(np.asarray(values))
    M = len(a)
    if radii is None:
        radii = [0] + [1 << j for j in range(int(math.log2(M)) - 1)]
    ext = np.concatenate([a, a, a])
    csum = np.concatenate([[0.0], np.cumsum(ext)])
    i = np.arange(M) + M
    best = np.zeros(M)
    for R in radii:
        avg = (csum[i + R + 1] - csum[i - R]) / (2 * R + 1)
        np.maximum(best, avg, out=best)
    return best


def smoothness_check_F(state: MultiFreqState, scales=None, k_floor: int = DEFAULT_K_FLOOR,
                       trunc_c: float = 1.0) -> tuple[float, float]:
    """Lipschitz quotients ``max |F(x + 1) - F(x)| / M_HL f(x)`` over unit steps.

    Returns ``(truncated, untruncated)``: the first uses only scales with
    ``k >= trunc_c log2(N)^2``.  A zero signal gives ``(0, 0)``.
    """
    ks = _scale_list(state, scales, k_floor)
    hl = cyclic_hl_maximal(state.f.values)
    if not np.any(hl):
        return 0.0, 0.0
    step = state.samples_per_unit

    def quotient(kk):
        F = vector_maximal_F(state, k_floor, kk)
        jump = np.abs(np.roll(F, -step) - F)
        ok = hl > 0
        return float(np.max(jump[ok] / hl[ok])) if ok.any() else 0.0

    trunc = truncation_floor(len(state.theta), ks, trunc_c)
    return quotient(trunc), quotient(ks)


def band_limited_noise(theta: FrequencySet, M: int, samples_per_unit: int, rng) -> CyclicSignal:
    """Gaussian noise restricted to the union of the bands ``|xi - theta_n| < 1/2``."""
    freqs = np.fft.fftfreq(M, d=1.0 / samples_per_unit)
    mask = np.zeros(M, dtype=bool)
    for th in theta.thetas:
        mask |= np.abs(freqs - th) < 0.5
    F = (rng.standard_normal(M) + 1j * rng.standard_normal(M)) * mask
    return CyclicSignal(np.fft.ifft(F))


@dataclass(frozen=True)
class Log2NRow:
    N: int
    ratio_max: float
    ratio_over_log2N: float

    def as_dict(self) -> dict:
        return {"N": self.N, "ratio_max": self.ratio_max, "ratio_over_log2N": self.ratio_over_log2N}


def log2N_experiment(N_list, trials: int, k_range=None, rng_seed: int = 0,
                     M: int = DEFAULT_MODULUS, samples_per_unit: int = DEFAULT_SAMPLES_PER_UNIT,
                     k_floor: int = DEFAULT_K_FLOOR) -> tuple[list[Log2NRow], DecayFit | None]:
    """Max over trials of ``||M_Theta f|| / ||f||`` for each N, and its fit
    against ``1 + log2(N)^2``.

    Trial t of size N draws from the generator spawned for (N index, t), so
    rows do not depend on the order in which trials run.
    """
    Ns = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("N_list must be increasing")
    ks = list(k_range) if k_range is not None else default_scales(M, samples_per_unit, k_floor)
    root = np.random.SeedSequence(rng_seed)
    rows = []
    for seq, N in zip(root.spawn(len(Ns)), Ns):
        worst = 0.0
        for child in seq.spawn(trials):
            rng = np.random.default_rng(child)
            theta = random_frequency_set(N, M, samples_per_unit, rng)
            f = band_limited_noise(theta, M, samples_per_unit, rng)
            state = MultiFreqState(theta, f, samples_per_unit)
            ratio = np.linalg.norm(multifreq_maximal(state, ks, k_floor)) / np.linalg.norm(f.values)
            worst = max(worst, float(ratio))
        rows.append(Log2NRow(N, worst, worst / (1 + math.log2(N) ** 2)))
    fit = None
    if len(rows) >= 3:
        fit = fit_loglog([1 + math.log2(r.N) ** 2 for r in rows], [r.ratio_max for r in rows])
    return rows, fit
