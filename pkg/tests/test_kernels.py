from fractions import Fraction

import numpy as np
import pytest

from weyl_lab.expsums import normalized_weyl_sums
from weyl_lab.kernels import (SMOOTH_MASS_BOUNDS, STATIONARY_PHASE_CONSTANT, SQUARE_BOUND_CONSTANT,
                              MemoryBudgetError, QuadratureRefusal, build_kernel,
                              continuous_square_bound_check, convolve, default_xi_samples,
                              evaluate_vk, hl_maximal, kernel_multiplier, maximal_operator,
                              phi_hat)
from weyl_lab.signals import GridSignal, l2_norm


def naive_convolve(K, f):
    out = {}
    for p, w in K.atoms:
        for i, v in enumerate(f.values):
            out[f.offset + i + p] = out.get(f.offset + i + p, 0) + w * v
    return out


def test_kernel_atoms():
    assert build_kernel(2, 1).atoms == [(1, 0.5), (4, 0.5)]
    assert build_kernel(2, 2).atoms == [(1, .25), (4, .25), (9, .25), (16, .25)]


def test_smooth_kernel_support():
    K = build_kernel(2, 3, smooth=True)
    n = np.sqrt(K.positions).astype(int)
    assert n.min() > 3 and n.max() < 33
    assert np.all(K.weights > 0)


@pytest.mark.parametrize("k", range(1, 21))
def test_mass_exact(k):
    # the atoms are few; only the dense span would be large
    K = build_kernel(2, k, budget_bytes=1 << 50)
    assert K.exact_mass() == Fraction(1)
    assert len(K.positions) == 2**k


@pytest.mark.parametrize("k", [1, 4, 8, 11])
def test_smooth_mass_bounds(k):
    lo, hi = SMOOTH_MASS_BOUNDS
    assert lo <= build_kernel(2, k, smooth=True).mass() <= hi


def test_budget_refusal():
    with pytest.raises(MemoryBudgetError):
        build_kernel(3, 12, budget_bytes=1 << 20)
    with pytest.raises(MemoryBudgetError):
        convolve(build_kernel(2, 6), GridSignal(0, np.ones(1000)), budget_bytes=1000)


def test_convolve_examples():
    K = build_kernel(2, 1)
    g = convolve(K, GridSignal.delta())
    assert g.allclose(GridSignal(1, [0.5, 0, 0, 0.5]))
    assert l2_norm(convolve(K, GridSignal.zeros(0, 9))) == 0
    box = GridSignal(0, np.ones(101))
    assert convolve(build_kernel(2, 2), box).at(20) == pytest.approx(1.0)


def test_convolve_direct_vs_naive():
    rng = np.random.default_rng(0)
    for smooth in (False, True):
        K = build_kernel(3, 3, smooth)
        f = GridSignal(-7, rng.standard_normal(40) + 1j * rng.standard_normal(40))
        g = convolve(K, f)
        for x, v in naive_convolve(K, f).items():
            assert abs(g.at(x) - v) < 1e-12


def test_convolve_fft_path_matches_direct(monkeypatch):
    import weyl_lab.kernels as kern
    rng = np.random.default_rng(1)
    K = build_kernel(2, 5, smooth=True)
    f = GridSignal(3, rng.standard_normal(300) + 1j * rng.standard_normal(300))
    direct = convolve(K, f)
    monkeypatch.setattr(kern, "DIRECT_PRODUCT_LIMIT", 0)
    assert convolve(K, f).allclose(direct, atol=1e-10)


def test_fourier_tie_to_weyl_sums():
    for k in range(1, 9):
        K = build_kernel(2, k)
        M = 1 << (2 * k + 3)
        dense = np.zeros(M)
        dense[K.positions] = K.weights
        F = np.fft.fft(dense)
        j = np.arange(0, M, max(1, M // 512))
        assert np.max(np.abs(F[j] - normalized_weyl_sums(2, 2**k, j / M))) < 1e-9
        assert np.max(np.abs(F[j] - kernel_multiplier(K, j / M))) < 1e-9


def test_l2_contractivity():
    rng = np.random.default_rng(2)
    for trial in range(100):
        k = int(rng.integers(1, 7))
        f = GridSignal(int(rng.integers(-50, 50)), rng.standard_normal(int(rng.integers(1, 200))))
        assert l2_norm(convolve(build_kernel(2, k), f)) <= l2_norm(f) * (1 + 1e-12)


def test_maximal_examples():
    m = maximal_operator(2, 6, GridSignal.delta())
    assert m.at(4) == pytest.approx(0.5)
    assert m.at(3) == 0
    rng = np.random.default_rng(3)
    f = GridSignal(0, rng.random(50))
    m = maximal_operator(2, 4, f)
    k1 = convolve(build_kernel(2, 1), f)
    assert np.all(m.at(k1.indices) >= np.abs(k1.values) - 1e-15)


def test_maximal_monotone_and_sublinear():
    rng = np.random.default_rng(4)
    f = GridSignal(0, rng.standard_normal(60))
    g = GridSignal(10, rng.standard_normal(40))
    xs = np.arange(-5, 400)
    m3, m4 = maximal_operator(2, 3, f), maximal_operator(2, 4, f)
    assert np.all(m4.at(xs).real >= m3.at(xs).real - 1e-15)
    s = maximal_operator(2, 4, f + g).at(xs).real
    assert np.all(s <= (m4.at(xs) + maximal_operator(2, 4, g).at(xs)).real + 1e-12)
    assert np.allclose(maximal_operator(2, 4, f * (-3j)).at(xs), 3 * m4.at(xs))


def test_all_lengths_dominates_dyadic():
    rng = np.random.default_rng(5)
    f = GridSignal(0, rng.random(30))
    full = maximal_operator(2, 4, f, dyadic=False)
    dy = maximal_operator(2, 4, f)
    xs = dy.indices
    assert np.all(full.at(xs).real >= dy.at(xs).real - 1e-12)


def test_hl_examples():
    h = hl_maximal(GridSignal.delta())
    assert h.at(0) == 1
    assert h.at(5) == pytest.approx(1 / 11)
    assert np.allclose(h.at(np.arange(-8, 9)), 1 / (2 * np.abs(np.arange(-8, 9)) + 1))
    assert hl_maximal(GridSignal(0, np.ones(10))).at(4) == 1


def test_hl_against_bruteforce():
    rng = np.random.default_rng(6)
    f = GridSignal(2, rng.standard_normal(25))
    h = hl_maximal(f, (-10, 40))
    a = {x: abs(f.at(x)) for x in range(-100, 150)}
    for x in range(-10, 40):
        best = max(sum(a[y] for y in range(x - N, x + N + 1)) / (2 * N + 1) for N in range(0, 60))
        assert h.at(x) == pytest.approx(best, abs=1e-12)


def test_single_scale_vs_hl():
    # K_k * f <= C_k M_HL f with C_k = 2^((d-1)k) (2 + 2^-dk) for f >= 0
    rng = np.random.default_rng(7)
    for k in (1, 2, 3):
        f = GridSignal(0, rng.random(40))
        g = convolve(build_kernel(2, k), f)
        h = hl_maximal(f, (g.offset, g.stop))
        C = 2.0 ** k * (2 + 2.0 ** (-2 * k))
        assert np.all(g.values.real <= C * h.values.real + 1e-12)


def test_vk_examples():
    assert evaluate_vk(2, 5, 0.0) == 1
    for lam in (10.0, 100.0, 1000.0):
        v = evaluate_vk(2, 3, lam / 64)
        assert abs(v) * lam**0.5 <= STATIONARY_PHASE_CONSTANT
    for lam in (1e-3, 1e-2, 0.1):
        v = evaluate_vk(2, 3, lam / 64)
        assert abs(v - 1) <= 2 * np.pi / 3 * lam


def test_vk_against_fresnel():
    from scipy.special import fresnel
    lam = 37.0
    S, C = fresnel(2 * np.sqrt(lam))
    exact = (C - 1j * S) / (2 * np.sqrt(lam))
    assert abs(evaluate_vk(2, 0, lam) - exact) < 1e-12


def test_vk_refusal():
    with pytest.raises(QuadratureRefusal):
        evaluate_vk(2, 10, 1.0)
    with pytest.raises(ValueError):
        evaluate_vk(2, 1, 0.1, max_nodes=100)


def test_square_bound_examples():
    assert continuous_square_bound_check(2, [1, 2, 3], [0.0]) == 0
    ks = range(1, 13)
    val = continuous_square_bound_check(2, ks, default_xi_samples(2, ks))
    assert 0 < val <= SQUARE_BOUND_CONSTANT
    xi = default_xi_samples(2, [5], 40)
    single = continuous_square_bound_check(2, [5], xi)
    assert single <= (1 + max(abs(phi_hat(x * 2**10)) for x in xi)) ** 2
