"""Signals on Z and Z_M, Fourier transforms and smooth cutoff profiles.

Conventions
-----------
* ``e(t) = exp(2*pi*i*t)``.
* DFT on Z_M is the unnormalized forward sum ``F[j] = sum_n f[n] e(-jn/M)``;
  the inverse carries the ``1/M``.  Parseval reads
  ``sum |f|^2 = (1/M) sum |F|^2``.
* Dyadic dilations are L1-normalized: ``g_k(t) = 2^-k g(2^-k t)``, so on the
  Fourier side ``(g_k)^(xi) = g^(2^k xi)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

__all__ = [
    "GridSignal",
    "CyclicSignal",
    "RationalFreq",
    "ScaleFamily",
    "SmoothCutoff",
    "SampledKernel",
    "smooth_step",
    "l2_norm",
    "dft",
    "idft",
    "modulate",
    "make_cutoff",
    "dilate",
    "chi_hat",
    "chi_physical",
    "phi_profile",
    "CUTOFF_KINDS",
    "DEFAULT_RESOLUTION",
]

DEFAULT_RESOLUTION = 64
CUTOFF_KINDS = ("chi", "phi", "mu-weight")


def _frozen(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridSignal:
    """Finitely supported function on Z: ``f(offset + i) = values[i]``."""

    offset: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "values", _frozen(self.values))

    @classmethod
    def delta(cls, at: int = 0) -> "GridSignal":
        return cls(at, [1.0])

    @classmethod
    def zeros(cls, offset: int = 0, length: int = 1) -> "GridSignal":
        return cls(offset, np.zeros(length))

    @property
    def stop(self) -> int:
        return self.offset + len(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.stop)

    def __len__(self) -> int:
        return len(self.values)

    def at(self, x) -> np.ndarray | complex:
        """Evaluate at integer point(s); zero off the stored window."""
        xs = np.asarray(x, dtype=np.int64)
        i = xs - self.offset
        inside = (i >= 0) & (i < len(self.values))
        out = np.zeros(xs.shape, dtype=complex)
        out[inside] = self.values[i[inside]]
        return out if out.ndim else complex(out)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Dense copy of ``f`` on ``[lo, hi)``."""
        return self.at(np.arange(lo, hi))

    def trim(self, tol: float = 0.0) -> "GridSignal":
        nz = np.flatnonzero(np.abs(self.values) > tol)
        if nz.size == 0:
            return GridSignal(0, [0.0])
        return GridSignal(self.offset + nz[0], self.values[nz[0]: nz[-1] + 1])

    def real(self) -> np.ndarray:
        return self.values.real

    def __add__(self, other: "GridSignal") -> "GridSignal":
        lo = min(self.offset, other.offset)
        hi = max(self.stop, other.stop)
        return GridSignal(lo, self.window(lo, hi) + other.window(lo, hi))

    def __mul__(self, c) -> "GridSignal":
        return GridSignal(self.offset, self.values * c)

    __rmul__ = __mul__

    def __abs__(self) -> "GridSignal":
        return GridSignal(self.offset, np.abs(self.values))

    def allclose(self, other: "GridSignal", atol: float = 1e-12) -> bool:
        lo = min(self.offset, other.offset)
        hi = max(self.stop, other.stop)
        return bool(np.allclose(self.window(lo, hi), other.window(lo, hi), rtol=0, atol=atol))


@dataclass(frozen=True, eq=False)
class CyclicSignal:
    """Function on Z_M, stored as its M values."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.size < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "values", v)

    @property
    def modulus(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, order=True)
class RationalFreq:
    """Reduced fraction A/Q in [0, 1)."""

    A: int
    Q: int

    def __post_init__(self):
        if self.Q < 1:
            raise ValueError(f"denominator must be >= 1, got {self.Q}")
        if not 0 <= self.A < self.Q:
            raise ValueError(f"need 0 <= A < Q, got {self.A}/{self.Q}")
        if gcd(self.A, self.Q) != 1:
            raise ValueError(f"{self.A}/{self.Q} is not reduced")

    @classmethod
    def reduce(cls, A: int, Q: int) -> "RationalFreq":
        frac = Fraction(A, Q) % 1
        return cls(frac.numerator, frac.denominator)

    def __float__(self) -> float:
        return self.A / self.Q

    def as_fraction(self) -> Fraction:
        return Fraction(self.A, self.Q)

    def __str__(self) -> str:
        return f"{self.A}/{self.Q}"


@dataclass(frozen=True)
class ScaleFamily:
    """Signals indexed by a strictly increasing list of scales on one domain."""

    scales: tuple
    members: tuple

    def __post_init__(self):
        scales = tuple(int(k) for k in self.scales)
        members = tuple(self.members)
        if len(scales) != len(members):
            raise ValueError("one member per scale required")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly increasing")
        if members:
            dom = _domain(members[0])
            if any(_domain(m) != dom for m in members[1:]):
                raise ValueError("members must share a domain")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "members", members)

    def stack(self) -> np.ndarray:
        """Array of shape (len(scales), domain size)."""
        return np.stack([m.values for m in self.members])

    def __len__(self) -> int:
        return len(self.scales)


def _domain(sig):
    if isinstance(sig, GridSignal):
        return ("grid", sig.offset, len(sig))
    if isinstance(sig, CyclicSignal):
        return ("cyclic", sig.modulus)
    raise TypeError(f"not a signal: {type(sig).__name__}")


def l2_norm(f: GridSignal | CyclicSignal) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2)))


def dft(f: CyclicSignal) -> CyclicSignal:
    return CyclicSignal(np.fft.fft(f.values))


def idft(F: CyclicSignal) -> CyclicSignal:
    return CyclicSignal(np.fft.ifft(F.values))


def modulate(f: CyclicSignal, shift: int) -> CyclicSignal:
    """Multiply by ``e(shift * n / M)``; the DFT moves right by ``shift`` bins."""
    M = f.modulus
    n = np.arange(M)
    return CyclicSignal(f.values * np.exp(2j * np.pi * ((shift * n) % M) / M))


# ---------------------------------------------------------------- cutoffs

def _sigma(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, strictly increasing between."""
    x = np.asarray(x, dtype=float)
    a = _sigma(x)
    b = _sigma(1.0 - x)
    return a / (a + b)


def chi_hat(xi) -> np.ndarray:
    """Frequency profile with 1 on [-1/4, 1/4] and 0 off (-1/2, 1/2)."""
    return smooth_step(4.0 * (0.5 - np.abs(np.asarray(xi, dtype=float))))


def phi_profile(t) -> np.ndarray:
    """Top-half bump: 1 on [1, 2], 0 off (1/2, 4)."""
    t = np.asarray(t, dtype=float)
    return smooth_step(2.0 * (t - 0.5)) * smooth_step((4.0 - t) / 2.0)


def mu_weight(t, d: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t <= 1)
    out[inside] = 1.0 / (d * t[inside] ** (1.0 - 1.0 / d))
    return out


_CHI_HALF_WINDOW = 256


@lru_cache(maxsize=8)
def _chi_physical_table(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    # chi = inverse FT of chi_hat; sampled through a periodized DFT whose
    # period 2*W leaves a tail below 1e-15.
    W = _CHI_HALF_WINDOW
    M = 2 * W * resolution
    dxi = 1.0 / (2 * W)
    freqs = np.fft.fftfreq(M, d=1.0 / M) * dxi
    vals = np.fft.ifft(chi_hat(freqs)).real * M * dxi
    x = np.arange(-W * resolution, W * resolution) / resolution
    vals = np.fft.fftshift(vals)
    vals.setflags(write=False)
    x.setflags(write=False)
    return x, vals


def chi_physical(t, resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    """Physical-space chi (inverse FT of ``chi_hat``), interpolated from a table."""
    x, vals = _chi_physical_table(resolution)
    return np.interp(np.asarray(t, dtype=float), x, vals, left=0.0, right=0.0)


@dataclass(frozen=True, eq=False)
class SmoothCutoff:
    """A sampled cutoff profile.

    ``chi`` samples the frequency profile on [-1, 1]; ``phi`` samples the
    physical top-half bump on [0, 5]; ``mu-weight`` samples
    ``1/(d t^(1-1/d))`` on (0, 1].
    """

    kind: str
    edges: tuple
    resolution: int
    grid: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    d: int = 2

    def __call__(self, x) -> np.ndarray:
        if self.kind == "chi":
            return chi_hat(x)
        if self.kind == "phi":
            return phi_profile(x)
        return mu_weight(x, self.d)

    def physical(self, t) -> np.ndarray:
        """The profile as a function of time (chi is transformed back)."""
        if self.kind == "chi":
            return chi_physical(t, self.resolution)
        return self(t)

    def mass(self) -> float:
        if self.kind == "chi":
            return 1.0
        if self.kind == "mu-weight":
            return 1.0
        from scipy.integrate import quad

        return quad(phi_profile, 0.5, 4.0, limit=200, epsabs=1e-13)[0]


def make_cutoff(kind: str, grid_resolution: int = DEFAULT_RESOLUTION, d: int = 2) -> SmoothCutoff:
    if kind not in CUTOFF_KINDS:
        raise ValueError(f"unknown cutoff kind {kind!r}; expected one of {CUTOFF_KINDS}")
    if grid_resolution < 16:
        raise ValueError("grid_resolution must be >= 16 samples per unit")
    if kind == "chi":
        edges = (0.25, 0.5)
        grid = np.arange(-grid_resolution, grid_resolution + 1) / grid_resolution
        samples = chi_hat(grid)
    elif kind == "phi":
        edges = (0.5, 1.0, 2.0, 4.0)
        grid = np.arange(0, 5 * grid_resolution + 1) / grid_resolution
        samples = phi_profile(grid)
    else:
        edges = (0.0, 1.0)
        grid = np.arange(1, grid_resolution + 1) / grid_resolution
        samples = mu_weight(grid, d)
    grid.setflags(write=False)
    samples.setflags(write=False)
    return SmoothCutoff(kind, edges, grid_resolution, grid, samples, d)


@dataclass(frozen=True, eq=False)
class SampledKernel:
    """Samples of ``t -> 2^-k g(2^-k t)`` on a uniform time grid."""

    k: int
    times: np.ndarray
    values: np.ndarray
    step: float

    def mass(self) -> float:
        return float(np.sum(self.values) * self.step)


def dilate(c: SmoothCutoff, k: int) -> SampledKernel:
    """L1-normalized dyadic dilation of the physical profile, sampled.

    The time grid is the profile's base grid stretched by ``2^k``, so the
    samples for every ``k`` are the same numbers scaled by ``2^-k``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    res = c.resolution
    if c.kind == "chi":
        base_t, base_v = _chi_physical_table(res)
    elif c.kind == "phi":
        base_t = np.arange(0, 5 * res + 1) / res
        base_v = phi_profile(base_t)
    else:
        # midpoint samples keep the integrable singularity at 0 off the grid
        base_t = (np.arange(res) + 0.5) / res
        base_v = mu_weight(base_t, c.d)
    scale = 2.0 ** k
    return SampledKernel(k, base_t * scale, base_v / scale, scale / res)


def as_fraction(beta) -> Fraction:
    if isinstance(beta, RationalFreq):
        return beta.as_fraction()
    if isinstance(beta, Fraction):
        return beta
    return Fraction(float(beta))


def dense_window(signals: Sequence[GridSignal]) -> tuple[int, int]:
    lo = min(s.offset for s in signals)
    hi = max(s.stop for s in signals)
    return lo, hi
