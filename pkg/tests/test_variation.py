import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weyl_lab.signals import GridSignal
from weyl_lab.variation import (GridResolutionError, SampledPath, cyclic_chi_family,
                                cyclic_dyadic_expectation, dyadic_expectation, entropy_covering,
                                interpolation_bound, jump_count, lepingle_check,
                                r_variation, r_variation_bruteforce, r_variation_many,
                                rademacher_menshov_scan, sobolev_embedding_check,
                                vector_variation)


def random_paths(n, seed=0, max_len=12):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        L = int(rng.integers(1, max_len + 1))
        if rng.random() < 0.5:
            yield SampledPath.of(rng.standard_normal(L))
        else:
            yield SampledPath.of(rng.integers(-3, 4, L).astype(float))


def test_path_contract():
    with pytest.raises(ValueError):
        SampledPath([0, 0], [1, 2])
    with pytest.raises(ValueError):
        SampledPath([0, 1], [1])
    assert SampledPath.of([[0, 1], [2, 3], [4, 5]]).dim == 2


def test_jump_examples():
    assert jump_count(SampledPath.of([2.0] * 5), 0.1).count == 0
    prof = jump_count(SampledPath.of([0, 1, 0, 1]), 0.5)
    assert prof.count == 3 and prof.witness == (0, 1, 2, 3)
    assert jump_count(SampledPath.of([0, 1, 0, 1]), 1.5).count == 0
    # ties at exactly lambda do not count
    assert jump_count(SampledPath.of([0, 1]), 1.0).count == 0
    with pytest.raises(ValueError):
        jump_count(SampledPath.of([0, 1]), 0)


def test_jump_witness_gaps():
    for p in random_paths(200, seed=1):
        prof = jump_count(p, 0.7)
        w = prof.witness
        assert prof.count == len(w) - 1
        assert all(p.dist(a, b) > 0.7 for a, b in zip(w, w[1:]))


def test_variation_examples():
    assert r_variation(SampledPath.of([0, 1]), 3) == pytest.approx(1)
    assert r_variation(SampledPath.of([0, 1, 0]), 2, allow_small_r=True) == pytest.approx(2**0.5)
    assert r_variation(SampledPath.of([0, 1, 2, 3]), 3) == pytest.approx(3)
    assert r_variation(SampledPath.of([5.0]), 3) == 0
    with pytest.raises(ValueError):
        r_variation(SampledPath.of([0, 1]), 2)
    with pytest.raises(ValueError):
        r_variation(SampledPath.of([0, 1]), 1, allow_small_r=True)


def test_dp_matches_bruteforce():
    for i, p in enumerate(random_paths(1000, seed=2)):
        r = (2.5, 3.0, 7.0)[i % 3]
        assert abs(r_variation(p, r) - r_variation_bruteforce(p, r)) < 1e-12


def test_many_matches_single():
    rng = np.random.default_rng(3)
    vals = rng.standard_normal((20, 9, 3))
    many = r_variation_many(vals, 4)
    assert np.allclose(many, [r_variation(SampledPath.of(v), 4) for v in vals], atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30),
       st.floats(0.01, 5), st.sampled_from([2.1, 3.0, 5.0]))
def test_jump_bound_by_variation(vals, lam, r):
    p = SampledPath.of(vals)
    N = jump_count(p, lam).count
    assert lam * N ** (1 / r) <= r_variation(p, r) * (1 + 1e-12) + 1e-12


def test_interpolation_bound():
    for p in random_paths(300, seed=4, max_len=30):
        for v in range(-2, 5):
            lhs, rhs = interpolation_bound(p, v, 3.0)
            assert lhs <= rhs * (1 + 1e-12) + 1e-15


def test_covering_examples():
    assert len(entropy_covering(SampledPath.of([1.0] * 6), 3)) == 1
    cov = entropy_covering(SampledPath.of([0.0, 1.0]), 2)
    assert len(cov) == 2 and cov.exact
    # far too coarse a radius: singleton
    assert len(entropy_covering(SampledPath.of([0.0, 1.0]), -3)) == 1


def test_covering_is_cover_and_minimal():
    rng = np.random.default_rng(5)
    for _ in range(40):
        p = SampledPath.of(rng.random(int(rng.integers(2, 13))))
        for v in range(0, 5):
            cov = entropy_covering(p, v)
            D = p.distances()
            assert np.all(np.min(D[:, list(cov.centers)], axis=1) <= cov.radius)
            # nothing smaller covers: try all subsets one size down
            from itertools import combinations
            smaller = len(cov) - 1
            if smaller >= 1:
                assert not any(np.all(np.min(D[:, list(c)], axis=1) <= cov.radius)
                               for c in combinations(range(len(p)), smaller))
            for c, u in cov.parent.items():
                assert D[c, u] <= 2.0**-v + 2.0 ** -(v - 1)


def test_greedy_cover_large_paths():
    p = SampledPath.of(np.random.default_rng(6).random(200))
    cov = entropy_covering(p, 4)
    assert not cov.exact
    assert np.all(np.min(p.distances()[:, list(cov.centers)], axis=1) <= cov.radius)


def test_entropy_vs_jumps_and_variation():
    r = 3.0
    for p in random_paths(200, seed=7, max_len=16):
        if np.ptp(p.values) == 0:
            continue
        V = r_variation(p, r)
        ent = jumps = 0.0
        for v in range(-3, 8):
            size = len(entropy_covering(p, v))
            N = jump_count(p, 2.0**-v).count
            assert size <= N + 1
            ent += 2.0**-v * size**0.5
            jumps += 2.0**-v * (N + 1) ** 0.5
            if v >= 0:
                assert 2.0**-v * (size - 1) ** (1 / r) <= V + 1e-12
        assert ent <= 4 * jumps and jumps <= 4 * ent


def test_dyadic_expectation_examples():
    f = GridSignal(0, [1, 3, 5, 7])
    assert np.allclose(dyadic_expectation(f, 1).values, [2, 2, 6, 6])
    assert dyadic_expectation(f, 0).allclose(f)
    e21 = dyadic_expectation(dyadic_expectation(f, 1), 2)
    assert np.allclose(e21.values, [4, 4, 4, 4])
    assert e21.allclose(dyadic_expectation(f, 2))
    with pytest.raises(ValueError):
        dyadic_expectation(f, -1)


def test_expectation_tower_and_sums():
    rng = np.random.default_rng(8)
    f = GridSignal(-5, rng.standard_normal(37))
    for k in range(4):
        e = dyadic_expectation(f, k)
        assert e.values.sum() == pytest.approx(f.values.sum())
        assert dyadic_expectation(e, k).allclose(e)
        for j in range(k, 5):
            assert dyadic_expectation(e, j).allclose(dyadic_expectation(f, j))


def test_lepingle_examples():
    M = 64
    delta = np.zeros(M)
    delta[0] = 1
    fam = np.stack([cyclic_dyadic_expectation(delta, k) for k in range(7)])
    V = r_variation_many(fam.T, 3)
    # at x=0 the values are 2^-k, a monotone path from 1 to 1/64
    assert V[0] == pytest.approx(1 - 1 / 64)
    assert np.all(np.isfinite(V))
    lo = lepingle_check("martingale", 5, 8, 10.0, rng_seed=3)
    hi = lepingle_check("martingale", 5, 8, 2.1, rng_seed=3)
    assert 0 < lo and 0 < hi and np.isfinite(hi)
    assert lepingle_check("convolution", 3, 8, 4.0) > 0
    with pytest.raises(ValueError):
        lepingle_check("martingale", 0, 8, 3.0)
    with pytest.raises(ValueError):
        lepingle_check("heat", 1, 8, 3.0)


def test_raw_variation_decreases_in_r():
    rng = np.random.default_rng(9)
    vals = rng.standard_normal((50, 12))
    prev = r_variation_many(vals, 2.1)
    for r in (2.5, 4, 10):
        cur = r_variation_many(vals, r)
        assert np.all(cur <= prev + 1e-12)
        prev = cur


def test_square_function_splitting():
    rng = np.random.default_rng(10)
    M, r = 256, 3.0
    for _ in range(20):
        f = rng.standard_normal(M)
        chi = cyclic_chi_family(f, range(9)).real
        E = np.stack([cyclic_dyadic_expectation(f, k) for k in range(9)])
        lhs = r_variation_many(chi.T, r)
        sq = np.sqrt(np.sum((chi - E) ** 2, axis=0))
        assert np.all(lhs <= r_variation_many(E.T, r) + 2 * sq + 1e-12)


def test_rademacher_menshov_trend():
    rows, fit = rademacher_menshov_scan(trials=5, points=1024, rng_seed=1)
    assert [T for T, _ in rows] == [4, 8, 16, 32, 64, 128, 256]
    assert all(1 <= w for _, w in rows)
    assert fit.slope <= 1


def test_sobolev_examples():
    t = np.linspace(0, 1, 2001)
    const = np.full((3, t.size), 2.0)
    assert sobolev_embedding_check(const, t, 0) <= 0
    assert sobolev_embedding_check(np.zeros((2, t.size)), t, 5) == 0
    sine = np.sin(2 * np.pi * t)[None, :] * np.array([[1.0], [0.3]])
    assert sobolev_embedding_check(sine, t, 0) <= 1e-3
    coarse = np.linspace(0, 1, 9)
    with pytest.raises(GridResolutionError):
        sobolev_embedding_check(np.sin(2 * np.pi * coarse)[None, :], coarse, 0)


def test_vector_variation():
    p = SampledPath.of([0.0, 1.0, 0.0, 2.0])
    assert vector_variation(p, 3).value == pytest.approx(r_variation(p, 3))
    two = SampledPath.of([[0, 0], [1, 0], [0, 0]])
    vv = vector_variation(two, 2, allow_small_r=True)
    assert vv.value == pytest.approx(2**0.5) and vv.component_bound == pytest.approx(2**0.5)
    rng = np.random.default_rng(12)
    for _ in range(100):
        vv = vector_variation(SampledPath.of(rng.standard_normal((15, 5))), 3)
        assert vv.holds
