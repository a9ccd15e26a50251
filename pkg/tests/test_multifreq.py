import math

import numpy as np
import pytest

from weyl_lab.multifreq import (F_RATIO_CONSTANT, ORTHOGONALITY_CONSTANT, FrequencySet,
                                MultiFreqState, band_limited_noise, band_overlap,
                                cyclic_hl_maximal, default_scales, local_orthogonality_check,
                                log2N_experiment, multifreq_maximal, random_frequency_set,
                                small_scale_bound, smoothness_check_F, truncation_floor,
                                vector_maximal_F, xi_multiplier, xi_operator,
                                xi_operator_physical)
from weyl_lab.signals import CyclicSignal, chi_hat

M, SPU = 1 << 14, 32
L = M / SPU


def random_state(N, seed, noise="white"):
    rng = np.random.default_rng(seed)
    theta = random_frequency_set(N, M, SPU, rng)
    if noise == "white":
        f = CyclicSignal(rng.standard_normal(M) + 1j * rng.standard_normal(M))
    else:
        f = band_limited_noise(theta, M, SPU, rng)
    return MultiFreqState(theta, f, SPU)


def test_frequency_set_contract():
    fs = FrequencySet.from_thetas([0.0, 1.5, -3.0], L)
    assert np.allclose(fs.thetas, [-3.0, 0.0, 1.5])
    with pytest.raises(ValueError):
        FrequencySet.from_thetas([0.0, 1.0], L)
    with pytest.raises(ValueError):
        FrequencySet.from_thetas([0.5 / L], L)
    fs = random_frequency_set(16, M, SPU, np.random.default_rng(0))
    assert len(fs) == 16 and np.min(np.diff(fs.thetas)) > 1


def test_scale_helpers():
    assert default_scales(M, SPU) == [4, 6]
    assert default_scales(1 << 16, 64) == [4, 6]
    assert truncation_floor(1, [4, 6]) == [4, 6]
    assert truncation_floor(8, [4, 6]) == [6]


def test_bandpieces_are_band_limited():
    st = random_state(4, 1)
    P = np.fft.fft(st.bandpieces, axis=1)
    outside = np.abs(st.freqs) > 0.5
    assert np.sum(np.abs(P[:, outside]) ** 2) <= 1e-8 * np.sum(np.abs(P) ** 2)


def test_xi_single_unmodulated_frequency():
    rng = np.random.default_rng(2)
    f = CyclicSignal(rng.standard_normal(M))
    st = MultiFreqState(FrequencySet((0,), L), f, SPU)
    direct = np.fft.ifft(np.fft.fft(f.values) * chi_hat(16.0 * st.freqs))
    assert np.allclose(xi_operator(st, 4).values, direct, atol=1e-12)


def test_xi_kills_spectrum_off_bands():
    theta = FrequencySet.from_thetas([0.0, 3.0], L)
    freqs = np.fft.fftfreq(M, d=1 / SPU)
    F = np.where(np.abs(freqs - 1.5) < 0.2, 1.0, 0.0)
    st = MultiFreqState(theta, CyclicSignal(np.fft.ifft(F)), SPU)
    assert np.max(np.abs(xi_operator(st, 4).values)) < 1e-15


def test_xi_refuses_small_or_unresolved_scales():
    st = random_state(2, 3)
    with pytest.raises(ValueError):
        xi_operator(st, 2)
    with pytest.raises(ValueError):
        xi_multiplier(st, 8)


@pytest.mark.parametrize("seed", range(10))
def test_xi_exactness(seed):
    N = [1, 2, 4, 8, 16][seed % 5]
    st = random_state(N, 100 + seed)
    for k in (4, 6):
        assert np.max(xi_multiplier(st, k)) <= 1 + 1e-10
        freq = xi_operator(st, k).values
        phys = xi_operator_physical(st, k).values
        assert np.max(np.abs(freq - phys)) < 1e-8
    # the finer cutoff survives composition with the coarser one
    inner = MultiFreqState(st.theta, xi_operator(st, 4), SPU)
    assert np.max(np.abs(xi_operator(inner, 6).values - xi_operator(st, 6).values)) < 1e-8


def test_vector_maximal_F():
    rng = np.random.default_rng(4)
    theta = FrequencySet((0,), L)
    f = band_limited_noise(theta, M, SPU, rng)
    st = MultiFreqState(theta, f, SPU)
    piece = np.fft.fft(st.bandpieces[0])
    want = np.max([np.abs(np.fft.ifft(piece * chi_hat(2.0**k * st.freqs))) for k in (4, 6)], axis=0)
    assert np.allclose(vector_maximal_F(st), want)
    zero = MultiFreqState(theta, CyclicSignal(np.zeros(M)), SPU)
    assert np.all(vector_maximal_F(zero) == 0)
    worst = 0.0
    for seed in range(100):
        s = random_state(8, 200 + seed, noise="band")
        worst = max(worst, np.linalg.norm(vector_maximal_F(s)) / np.linalg.norm(s.f.values))
    assert worst <= F_RATIO_CONSTANT


def test_multifreq_maximal_properties():
    st = random_state(4, 5)
    m = multifreq_maximal(st)
    for k in (4, 6):
        assert np.all(m >= np.abs(xi_operator(st, k).values) - 1e-15)
    assert np.allclose(multifreq_maximal(st, [6]), np.abs(xi_operator(st, 6).values))
    scaled = MultiFreqState(st.theta, CyclicSignal(-2j * np.asarray(st.f.values)), SPU)
    assert np.allclose(multifreq_maximal(scaled), 2 * m)


def test_small_scale_and_overlap():
    for seed in range(5):
        st = random_state(8, 300 + seed)
        lhs, mid, rhs = small_scale_bound(st, [4, 6])
        assert lhs <= mid * (1 + 1e-12) and mid <= rhs * (1 + 1e-12)
        assert band_overlap(st) <= 1 + 1e-12


def test_local_orthogonality():
    assert local_orthogonality_check([0.3], [2.0], (0, 5)) == pytest.approx(1.0)
    assert local_orthogonality_check([0.3, 2.0], [0, 0], (0, 5)) == 0
    with pytest.raises(ValueError):
        local_orthogonality_check([0.0], [1.0], (0, 0.5))
    rng = np.random.default_rng(6)
    thetas = np.cumsum(rng.uniform(1.01, 2.0, 16))
    worst = 0.0
    for _ in range(200):
        a = np.exp(2j * np.pi * rng.random(16))
        worst = max(worst, local_orthogonality_check(thetas, a, (0.0, 1.0)))
    assert worst <= ORTHOGONALITY_CONSTANT


def test_cyclic_hl():
    d = np.zeros(64)
    d[0] = 1
    h = cyclic_hl_maximal(d)
    assert h[0] == 1 and h[1] == pytest.approx(1 / 3) and h[-1] == pytest.approx(1 / 3)
    assert np.allclose(cyclic_hl_maximal(np.full(64, 2.0)), 2.0)


def test_smoothness_check():
    const = MultiFreqState(FrequencySet((0,), L), CyclicSignal(np.ones(M)), SPU)
    t, u = smoothness_check_F(const)
    assert t < 1e-12 and u < 1e-12
    zero = MultiFreqState(FrequencySet((0,), L), CyclicSignal(np.zeros(M)), SPU)
    assert smoothness_check_F(zero) == (0.0, 0.0)
    for seed in range(5):
        t, u = smoothness_check_F(random_state(8, 400 + seed, noise="band"))
        assert t <= u


def test_log2N_small_run_deterministic():
    a, fit = log2N_experiment([1, 2, 4], trials=3, rng_seed=7, M=M, samples_per_unit=SPU)
    b, _ = log2N_experiment([1, 2, 4], trials=3, rng_seed=7, M=M, samples_per_unit=SPU)
    assert a == b
    assert fit is not None
    assert a[0].ratio_over_log2N == a[0].ratio_max
    assert all(r.ratio_over_log2N == pytest.approx(r.ratio_max / (1 + math.log2(r.N) ** 2)) for r in a)
    assert log2N_experiment([2, 4], 1, rng_seed=0, M=M, samples_per_unit=SPU)[1] is None
    with pytest.raises(ValueError):
        log2N_experiment([4, 2], 1)
