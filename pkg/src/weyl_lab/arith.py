"""Small number-theory helpers: totient sieve, primes, Farey enumeration."""
from __future__ import annotations

from math import gcd

import numpy as np
from sympy import isprime, primerange

__all__ = ["totient_sieve", "primes_upto", "isprime", "reduced_fractions"]


def totient_sieve(n: int) -> np.ndarray:
    """phi(0..n) by the multiplicative sieve; phi(0) is set to 0."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:  # untouched => prime
            phi[p::p] -= phi[p::p] // p
    if n >= 0:
        phi[0] = 0
    return phi


def primes_upto(n: int) -> list[int]:
    return list(primerange(2, n + 1))


def reduced_fractions(q_lo: int, q_hi: int) -> list[tuple[int, int]]:
    """All (A, Q) with gcd(A, Q) = 1, 0 <= A < Q, q_lo <= Q < q_hi; Q=1 gives (0, 1)."""
    out = []
    for Q in range(max(q_lo, 1), q_hi):
        out.extend((A, Q) for A in range(Q) if gcd(A, Q) == 1)
    return out
