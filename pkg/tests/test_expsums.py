import cmath
from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import totient

from weyl_lab.arith import reduced_fractions, totient_sieve
from weyl_lab.expsums import (ArcDecomposition, WeylSumCapError, complete_weyl_sum,
                              complete_weyl_sums, enumerate_shell, hua_scan, minor_arc_decay_scan,
                              normalized_weyl_sum, normalized_weyl_sums)
from weyl_lab.signals import RationalFreq


def naive_complete(d, A, Q):
    # separate path: Python integers and cmath, no numpy
    return sum(cmath.exp(-2j * cmath.pi * ((A * pow(n, d, Q)) % Q) / Q) for n in range(1, Q + 1)) / Q


def naive_normalized(d, N, beta: Fraction):
    return sum(cmath.exp(-2j * cmath.pi * float(beta * n**d % 1)) for n in range(1, N + 1)) / N


def test_complete_examples():
    assert complete_weyl_sum(2, RationalFreq(0, 1)) == 1
    assert abs(complete_weyl_sum(2, RationalFreq(1, 2))) < 1e-15
    assert abs(complete_weyl_sum(2, RationalFreq(1, 3))) == pytest.approx(3**-0.5, abs=1e-12)


def test_complete_matches_oracle_sample():
    for d in (2, 3, 4):
        for A, Q in reduced_fractions(1, 60):
            assert abs(complete_weyl_sum(d, RationalFreq(A, Q)) - naive_complete(d, A, Q)) < 1e-12


def test_batch_matches_single():
    for Q in (7, 12, 25, 64):
        S = complete_weyl_sums(3, Q)
        for A in range(Q):
            if gcd(A, Q) == 1:
                assert abs(S[A] - complete_weyl_sum(3, RationalFreq(A, Q))) < 1e-12


def test_conjugation_symmetry():
    for d in (2, 3):
        for A, Q in reduced_fractions(2, 51):
            s = complete_weyl_sum(d, RationalFreq(A, Q))
            t = complete_weyl_sum(d, RationalFreq.reduce(-A, Q))
            assert abs(s - t.conjugate()) < 1e-12
            assert abs(s) <= 1 + 1e-12


def test_cap_error():
    with pytest.raises(WeylSumCapError):
        complete_weyl_sum(2, RationalFreq(1, 101), cap=100)


def test_normalized_examples():
    assert normalized_weyl_sum(3, 17, 0.0) == 1
    assert abs(normalized_weyl_sum(2, 2, 0.5)) < 1e-15
    near = normalized_weyl_sum(2, 1024, Fraction(1, 3))
    assert abs(near - complete_weyl_sum(2, RationalFreq(1, 3))) < 0.05


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 400), st.integers(0, 2**40 - 1), st.integers(1, 40))
def test_normalized_against_exact_oracle(d, N, num, e):
    beta = Fraction(num % (1 << e), 1 << e)
    got = normalized_weyl_sum(d, N, float(beta))
    assert abs(got - naive_normalized(d, N, beta)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 2000), st.integers(0, 2**30 - 1))
def test_periodicity(d, N, num):
    beta = num / 2**30
    a = normalized_weyl_sums(d, N, [beta, beta + 1.0, beta - 3.0])
    assert np.allclose(a, a[0], atol=1e-12)


def test_tiny_frequency_keeps_low_bits():
    beta = Fraction(1, 2**30) + Fraction(1, 2**80)
    got = normalized_weyl_sum(3, 300, float(beta))
    assert abs(got - naive_normalized(3, 300, beta)) < 1e-12


def test_large_powers_reduce_exactly():
    # n^4 exceeds 2^53 here; dyadic beta keeps the phase exact
    beta = Fraction(12345, 2**20)
    N = 20000
    n = np.arange(1, N + 1, dtype=object)
    phases = np.array([float(beta * int(x) ** 4 % 1) for x in n])
    oracle = np.mean(np.exp(-2j * np.pi * phases))
    assert abs(normalized_weyl_sum(4, N, float(beta)) - oracle) < 1e-12


def test_hua_scan_examples():
    rows = hua_scan(2, 97)
    assert rows[0].Q == 1 and rows[0].normalized_max == 1
    assert len(rows) == 25
    assert all(abs(r.normalized_max - 1) < 1e-9 for r in rows)
    assert all(r.normalized_max <= 2.0 for r in hua_scan(3, 97))
    with pytest.raises(ValueError):
        hua_scan(2, 1)


def test_hua_scan_against_oracle():
    for r in hua_scan(3, 43):
        best = max(abs(naive_complete(3, A, r.Q)) for A in range(1, r.Q) if gcd(A, r.Q) == 1) if r.Q > 1 else 1
        assert r.normalized_max == pytest.approx(best * r.Q ** (1 / 3), abs=1e-10)


def test_shell_examples():
    assert enumerate_shell(1) == [RationalFreq(0, 1)]
    assert [str(f) for f in enumerate_shell(2)] == ["1/2", "1/3", "2/3"]
    assert len(enumerate_shell(5)) == sum(int(totient(q)) for q in range(16, 32))


def test_totient_sieve_against_sympy():
    phi = totient_sieve(5000)
    assert phi[0] == 0
    assert all(phi[n] == totient(n) for n in range(1, 5001))


@pytest.mark.parametrize("s", range(1, 13))
def test_shell_counts(s):
    phi = totient_sieve(1 << s)
    assert len(enumerate_shell(s)) == int(phi[1 << (s - 1): 1 << s].sum())


def test_arc_decomposition():
    arcs = ArcDecomposition.build(2**10, 0.2, 2)
    assert arcs.q_max == 4
    assert arcs.contains(0.5) and arcs.contains(0.0) and arcs.contains(0.9999999)
    assert not arcs.contains(0.1)
    with pytest.raises(ValueError):
        ArcDecomposition.build(8, 0.9, 2)


def test_minor_arc_contract():
    with pytest.raises(ValueError):
        minor_arc_decay_scan(2, [2**10, 2**9])
    with pytest.raises(ValueError):
        minor_arc_decay_scan(2, [2**7, 2**9, 2**10])
    with pytest.raises(ValueError):
        minor_arc_decay_scan(2, [2**8, 2**9, 2**10], samples=50)


def test_minor_arc_scan_small():
    fit = minor_arc_decay_scan(2, [2**8, 2**9, 2**10, 2**11], samples=200, rng_seed=1)
    assert fit.slope < 0
    assert all(0 < y <= 1 for y in fit.y)
