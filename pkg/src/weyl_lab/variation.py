"""Jump counts, r-variation, entropy coverings and dyadic martingales.

Paths are finite sequences of points in R^m with the Euclidean metric
(m = 1 for scalar paths).  The r-variation is the sup over increasing
subsequences of ``(sum |v_{i+1} - v_i|^r)^(1/r)``; it is computed exactly
by a quadratic dynamic program.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.integrate import trapezoid

from .fits import DecayFit, fit_loglog
from .signals import GridSignal, chi_hat

__all__ = [
    "SampledPath",
    "JumpProfile",
    "Covering",
    "VectorVariation",
    "jump_count",
    "r_variation",
    "r_variation_many",
    "r_variation_bruteforce",
    "interpolation_bound",
    "entropy_covering",
    "dyadic_expectation",
    "cyclic_dyadic_expectation",
    "cyclic_chi_family",
    "lepingle_check",
    "rademacher_menshov_scan",
    "sobolev_embedding_check",
    "vector_variation",
    "GridResolutionError",
    "EXACT_COVER_LIMIT",
]

EXACT_COVER_LIMIT = 20


class GridResolutionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SampledPath:
    times: np.ndarray
    values: np.ndarray  # shape (L,) or (L, m)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if len(t) < 1 or len(t) != len(v):
            raise ValueError("need len(times) == len(values) >= 1")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def of(cls, values) -> "SampledPath":
        """Path with times 0, 1, 2, ..."""
        v = np.asarray(values, dtype=float)
        return cls(np.arange(len(v)), v)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return len(self.times)

    def dist(self, i, j) -> np.ndarray:
        return np.linalg.norm(self.values[i] - self.values[j], axis=-1)

    def distances(self) -> np.ndarray:
        diff = self.values[:, None, :] - self.values[None, :, :]
        return np.sqrt(np.sum(diff**2, axis=-1))


@dataclass(frozen=True)
class JumpProfile:
    lam: float
    count: int
    witness: tuple  # indices into the path


def jump_count(p: SampledPath, lam: float) -> JumpProfile:
    """Greedy jump count: move the anchor whenever a value is > lam away."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    anchor = 0
    witness = [0]
    for j in range(1, len(p)):
        if p.dist(anchor, j) > lam:
            anchor = j
            witness.append(j)
    return JumpProfile(float(lam), len(witness) - 1, tuple(witness))


def _check_r(r: float, allow_small_r: bool):
    if r <= 1 or (r <= 2 and not allow_small_r):
        raise ValueError(f"r={r} needs r > 2 (or allow_small_r with r > 1)")


def r_variation_many(values, r: float, allow_small_r: bool = False) -> np.ndarray:
    """Exact r-variation of many paths at once.

    ``values`` has shape (P, L) for scalar paths or (P, L, m); the DP runs
    over the path index with all P paths vectorized.
    """
    _check_r(r, allow_small_r)
    v = np.asarray(values, dtype=float)
    if v.ndim == 2:
        v = v[..., None]
    P, L, _ = v.shape
    best = np.zeros((P, L))
    for j in range(1, L):
        step = np.sum((v[:, :j, :] - v[:, j: j + 1, :]) ** 2, axis=-1) ** (r / 2)
        best[:, j] = np.max(best[:, :j] + step, axis=1)
    return np.max(best, axis=1) ** (1.0 / r)


def r_variation(p: SampledPath, r: float, allow_small_r: bool = False) -> float:
    return float(r_variation_many(p.values[None], r, allow_small_r)[0])


def _subset_pair_matrix(L: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
    pairs = list(combinations(range(L), 2))
    index = {pq: n for n, pq in enumerate(pairs)}
    rows = []
    for mask in range(1, 1 << L):
        members = [i for i in range(L) if mask >> i & 1]
        if len(members) < 2:
            continue
        row = np.zeros(len(pairs))
        for a, b in zip(members, members[1:]):
            row[index[(a, b)]] = 1.0
        rows.append(row)
    return np.array(rows), pairs


_PAIR_CACHE: dict[int, tuple[np.ndarray, list]] = {}


def r_variation_bruteforce(p: SampledPath, r: float) -> float:
    """r-variation by enumerating every subsequence (length <= 16 only)."""
    L = len(p)
    if L > 16:
        raise ValueError("brute force is limited to 16 points")
    if L < 2:
        return 0.0
    if L not in _PAIR_CACHE:
        _PAIR_CACHE[L] = _subset_pair_matrix(L)
    mat, pairs = _PAIR_CACHE[L]
    D = p.distances()
    inc = np.array([D[a, b] ** r for a, b in pairs])
    return float(np.max(mat @ inc) ** (1.0 / r))


def interpolation_bound(p: SampledPath, v: int, r: float) -> tuple[float, float]:
    """``(2^-v min{N^(1/2), K^(1/2)}, K^(1/2-1/r) V^r)`` with ``N = N_{2^-v}``."""
    K = len(p)
    N = jump_count(p, 2.0**-v).count
    lhs = 2.0**-v * min(N**0.5, K**0.5)
    rhs = K ** (0.5 - 1.0 / r) * r_variation(p, r)
    return lhs, rhs


# ----------------------------------------------------------- coverings

@dataclass(frozen=True)
class Covering:
    """Centers (path indices) of radius-``2^-v`` balls covering the path.

    ``parent`` maps each center to the earliest center of the level ``v-1``
    covering whose ball meets its own; ``exact`` is False when the greedy
    2-approximation was used.
    """

    v: int
    radius: float
    centers: tuple
    parent: dict
    exact: bool

    def __len__(self) -> int:
        return len(self.centers)


def _exact_cover(masks: list[int], n: int) -> list[int]:
    full = (1 << n) - 1
    best: list[int] = list(range(n))

    def search(covered: int, chosen: list[int]):
        nonlocal best
        if covered == full:
            if len(chosen) < len(best):
                best = chosen.copy()
            return
        if len(chosen) + 1 >= len(best):
            return
        first = (~covered & full & -(~covered & full)).bit_length() - 1
        options = [c for c in range(n) if masks[c] >> first & 1]
        options.sort(key=lambda c: -bin(masks[c] & ~covered).count("1"))
        for c in options:
            chosen.append(c)
            search(covered | masks[c], chosen)
            chosen.pop()

    search(0, [])
    return sorted(best)


def _greedy_cover(D: np.ndarray, radius: float) -> list[int]:
    # farthest-point traversal: every point ends within radius of a center
    n = len(D)
    centers = [0]
    gap = D[0].copy()
    while gap.max() > radius:
        nxt = int(np.argmax(gap))
        centers.append(nxt)
        gap = np.minimum(gap, D[nxt])
    return sorted(centers)


def _cover(p: SampledPath, v: int) -> tuple[list[int], bool]:
    D = p.distances()
    radius = 2.0**-v
    if radius > 2 * D.max() or D.max() == 0:
        return [0], True
    n = len(p)
    if n <= EXACT_COVER_LIMIT:
        within = D <= radius
        masks = [int(sum(1 << j for j in np.flatnonzero(within[c]))) for c in range(n)]
        return _exact_cover(masks, n), True
    return _greedy_cover(D, radius), False


def entropy_covering(p: SampledPath, v: int) -> Covering:
    centers, exact = _cover(p, v)
    coarse, exact_up = _cover(p, v - 1)
    D = p.distances()
    reach = 2.0**-v + 2.0 ** -(v - 1)
    parent = {}
    for c in centers:
        # a coarse ball covers c, so some coarse ball meets the fine one
        parent[c] = min(u for u in coarse if D[c, u] <= reach)
    return Covering(v, 2.0**-v, tuple(centers), parent, exact and exact_up)


# ------------------------------------------------------- dyadic martingales

def dyadic_expectation(f: GridSignal, k: int) -> GridSignal:
    """Average over the dyadic blocks ``[m 2^k, (m+1) 2^k)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    size = 1 << k
    lo = (f.offset // size) * size
    hi = -(-f.stop // size) * size
    blocks = f.window(lo, hi).reshape(-1, size)
    means = blocks.mean(axis=1)
    return GridSignal(lo, np.repeat(means, size))


def cyclic_dyadic_expectation(values: np.ndarray, k: int) -> np.ndarray:
    """Block means of a signal on Z_M (M a multiple of 2^k); works on the last axis."""
    v = np.asarray(values)
    size = 1 << k
    shape = v.shape
    means = v.reshape(*shape[:-1], -1, size).mean(axis=-1, keepdims=True)
    return np.broadcast_to(means, (*shape[:-1], shape[-1] // size, size)).reshape(shape)


def cyclic_chi_family(values: np.ndarray, scales) -> np.ndarray:
    """``chi_k * f`` on Z_M for each k, with frequencies in cycles per sample."""
    v = np.asarray(values)
    M = v.shape[-1]
    F = np.fft.fft(v)
    xi = np.fft.fftfreq(M)
    out = [np.fft.ifft(F * chi_hat(2.0**k * xi)) for k in scales]
    return np.stack(out, axis=-2)


def lepingle_check(family_kind: str, trials: int, path_length: int, r: float,
                   rng_seed: int = 0, allow_small_r: bool = False) -> float:
    """Max over random signals of ``||V^r||_2 / (r/(r-2) ||f||_2)``.

    Each trial draws a standard normal signal on ``Z_M`` with
    ``M = 2^(path_length - 1)`` and forms the scale family
    ``E_k f`` (martingale) or ``chi_k * f`` (convolution) for
    ``k = 0..path_length-1``; ``V^r`` is taken across scales at every point.
    A zero signal contributes 0.
    """
    _check_r(r, allow_small_r)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if family_kind not in ("martingale", "convolution"):
        raise ValueError(f"unknown family {family_kind!r}")
    n = path_length - 1
    M = 1 << n
    rng = np.random.default_rng(rng_seed)
    norm = r / (r - 2) if r > 2 else 1.0
    worst = 0.0
    for _ in range(trials):
        f = rng.standard_normal(M)
        fn = float(np.linalg.norm(f))
        if fn == 0:
            continue
        if family_kind == "martingale":
            fam = np.stack([cyclic_dyadic_expectation(f, k) for k in range(n + 1)])
        else:
            fam = cyclic_chi_family(f, range(n + 1)).real
        V = r_variation_many(fam.T, r, allow_small_r)
        worst = max(worst, float(np.linalg.norm(V)) / (norm * fn))
    return worst


def rademacher_menshov_scan(T_sizes=(4, 8, 16, 32, 64, 128, 256), trials: int = 20,
                            points: int = 4096, rng_seed: int = 0) -> tuple[list, DecayFit]:
    """Maximal partial sums of a random-walk martingale.

    For each |T| the family is ``F_t = sum_{s<=t} eps_s`` (t in T) sampled at
    ``points`` independent paths; the ratio is
    ``||sup_t |F_t|||_2 / sup_t ||F_t||_2``, maximized over trials.  The fit
    is of the ratio against ``log^2 |T|``; a slope at most 1 means no growth
    beyond ``log^2``.
    """
    rng = np.random.default_rng(rng_seed)
    rows = []
    for T in T_sizes:
        worst = 0.0
        for _ in range(trials):
            steps = rng.choice([-1.0, 1.0], size=(points, T))
            F = np.cumsum(steps, axis=1)
            A = float(np.max(np.sqrt(np.mean(F**2, axis=0))))
            sup = float(np.sqrt(np.mean(np.max(np.abs(F), axis=1) ** 2)))
            worst = max(worst, sup / A)
        rows.append((T, worst))
    fit = fit_loglog([np.log2(T) ** 2 for T, _ in rows], [w for _, w in rows])
    return rows, fit


def sobolev_embedding_check(F: np.ndarray, t: np.ndarray, t_anchor: int,
                            C: float = 2.0, tol: float = 0.01) -> float:
    """Max over x of ``sup_t |F| - C|F(t_I)| - C (int|F|^2)^(1/4) (int|F_t|^2)^(1/4)``.

    ``F`` has shape (X, T) sampled on the time grid ``t``; ``t_anchor`` is
    the index of ``t_I``.  Derivatives are centered differences (one-sided
    at the ends).  The grid is refused if halving the resolution moves the
    derivative by more than ``tol`` in relative L2.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    t = np.asarray(t, dtype=float)
    dF = np.gradient(F, t, axis=1)
    scale = float(np.sqrt(np.sum(dF**2)))
    # roundoff-level derivatives of flat data are not worth checking
    flat = scale <= 1e-9 * (float(np.sqrt(np.sum(F**2)) / (t[-1] - t[0])) if len(t) > 1 else 0.0)
    if not flat and len(t) >= 5:
        coarse = np.gradient(F[:, ::2], t[::2], axis=1)
        rel = float(np.sqrt(np.sum((coarse - dF[:, ::2]) ** 2)) /
                    np.sqrt(np.sum(dF[:, ::2] ** 2)))
        if rel > tol:
            raise GridResolutionError(f"time grid too coarse: derivative moves by {rel:.2%}")
    lhs = np.max(np.abs(F), axis=1)
    energy = trapezoid(F**2, t, axis=1)
    slope = trapezoid(dF**2, t, axis=1)
    rhs = C * np.abs(F[:, t_anchor]) + C * energy**0.25 * slope**0.25
    return float(np.max(lhs - rhs))


@dataclass(frozen=True)
class VectorVariation:
    value: float
    component_bound: float

    @property
    def holds(self) -> bool:
        return self.value <= self.component_bound * (1 + 1e-12)


def vector_variation(p: SampledPath, r: float, allow_small_r: bool = False) -> VectorVariation:
    """Variation in the l2 metric, with the l2 norm of componentwise variations."""
    value = r_variation(p, r, allow_small_r)
    comps = r_variation_many(p.values.T, r, allow_small_r)
    return VectorVariation(value, float(np.linalg.norm(comps)))
