"""Randomized invariants across the package.

Instances are drawn from numpy generators seeded by hypothesis, so failures
shrink to a reproducible seed and dimensions.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridadc import admm, baselines, harness, metrics, numerics, quantization
from hybridadc.admm import AdmmConfig, initialize
from hybridadc.channel import ChannelParams, optimal_combiner, sample_channel
from hybridadc.quantization import QuantizationBounds

from conftest import crandn, fd_gradient

BOUNDS = QuantizationBounds()
LO, HI = BOUNDS.delta_range
SEEDS = st.integers(0, 2**32 - 1)
FAST = settings(max_examples=30, deadline=None)


@st.composite
def shapes(draw):
    n_s = draw(st.integers(1, 3))
    n_rf = draw(st.integers(n_s, 4))
    n_r = draw(st.integers(n_rf, 8))
    return n_r, n_rf, n_s


def _state(seed, n_r, n_rf, n_s):
    rng = np.random.default_rng(seed)
    s = initialize(rng, n_r, n_rf, n_s, BOUNDS)
    s.z = crandn(rng, n_r, n_s)
    s.lam = 0.3 * crandn(rng, n_r, n_s)
    return s, rng


# -- projection ----------------------------------------------------------------


@FAST
@given(SEEDS, st.integers(1, 6), st.integers(1, 6))
def test_projection_idempotent_and_zero_branch(seed, m, n):
    rng = np.random.default_rng(seed)
    a = crandn(rng, m, n)
    zeros = rng.random((m, n)) < 0.3
    a[zeros] = 0
    p = admm.project_unit_modulus(a)
    assert np.all(p[zeros] == 0)
    np.testing.assert_allclose(np.abs(p[~zeros]), 1, atol=1e-12)
    np.testing.assert_allclose(admm.project_unit_modulus(p), p, rtol=0, atol=1e-15)


# -- closed-form steps are stationary -----------------------------------------


@FAST
@given(SEEDS, shapes(), st.floats(0.1, 5))
def test_z_step_gradient(seed, dims, alpha):
    s, rng = _state(seed, *dims)
    w_opt = crandn(rng, dims[0], dims[2])
    x = s.product

    def obj(z):
        return 0.5 * np.linalg.norm(w_opt - z) ** 2 + 0.5 * alpha * np.linalg.norm(z + s.lam / alpha - x) ** 2

    assert np.linalg.norm(fd_gradient(obj, admm.z_step(s, w_opt, alpha))) < 1e-6


@FAST
@given(SEEDS, shapes(), st.floats(0.1, 5))
def test_wbb_step_gradient(seed, dims, alpha):
    s, _ = _state(seed, *dims)
    target = s.z + s.lam / alpha
    m = s.w_rf * s.delta

    def obj(x):
        return 0.5 * alpha * np.linalg.norm(target - m @ x) ** 2

    assert np.linalg.norm(fd_gradient(obj, admm.wbb_step(s, alpha))) < 1e-6


@FAST
@given(SEEDS, shapes(), st.floats(0.1, 5))
def test_wrf_unconstrained_gradient(seed, dims, alpha):
    s, _ = _state(seed, *dims)
    target = s.z + s.lam / alpha
    dw = s.delta[:, None] * s.w_bb

    def obj(m):
        return 0.5 * alpha * np.linalg.norm(target - m @ dw) ** 2

    assert np.linalg.norm(fd_gradient(obj, admm.wrf_unconstrained(s, alpha))) < 1e-6


# -- feasibility along the iterations -------------------------------------------


@settings(max_examples=10, deadline=None)
@given(SEEDS, shapes(), st.sampled_from([0.0, 0.001, 0.01, 0.1, 1.0]), st.booleans())
def test_iterates_stay_feasible(seed, dims, gamma, frozen):
    n_r, n_rf, n_s = dims
    rng = np.random.default_rng(seed)
    w_opt = np.linalg.qr(crandn(rng, n_r, n_s))[0]
    d0 = rng.uniform(LO, HI, n_rf) if frozen else None
    seen = []

    def check(state):
        np.testing.assert_allclose(np.abs(state.w_rf), 1, atol=1e-12)
        assert np.all((state.delta >= LO) & (state.delta <= HI))
        if frozen:
            np.testing.assert_array_equal(state.delta, d0)
        seen.append(state.iter)

    comb, _ = admm.run(w_opt, AdmmConfig(gamma=gamma, n_max=8), rng=rng, n_rf=n_rf, frozen_delta=d0, callback=check)
    assert seen == list(range(1, 9))
    assert np.all((comb.bits >= 1) & (comb.bits <= 8))


# -- quantization and metrics --------------------------------------------------


@FAST
@given(st.floats(1, 8), st.floats(1, 8))
def test_distortion_monotone_and_invertible(b1, b2):
    d1, d2 = quantization.delta_of_bits(b1), quantization.delta_of_bits(b2)
    # storing d in double moves b by up to ulp(d) * d / ((1 - d^2) ln 2),
    # about 2e-12 at b = 8; the 1e-12 roundtrip holds below that regime
    err = abs(quantization.bits_of_delta(d1) - b1)
    floor = 2 * np.spacing(d1) * d1 / ((1 - d1 * d1) * np.log(2))
    assert err < max(1e-12, floor)
    if b1 <= 7:
        assert err < 1e-12
    if b1 < b2:
        assert d1 < d2


@FAST
@given(st.floats(1, 8))
def test_bits_of_delta_accurate_for_stored_value(b):
    mp = pytest.importorskip("mpmath")
    d = quantization.delta_of_bits(b)
    with mp.workdps(40):
        exact = float(mp.log(mp.mpf(quantization.AQNM_CONST) / (1 - mp.mpf(d) ** 2), 2) / 2)
    assert abs(quantization.bits_of_delta(d) - exact) < 1e-12


def test_roundtrip_on_integer_bits():
    for b in range(1, 9):
        assert abs(quantization.bits_of_delta(quantization.delta_of_bits(b)) - b) < 1e-12


@given(st.integers(1, 7))
def test_noise_variance_decreasing_on_integer_bits(b):
    # k(1 - k) peaks near b = 1.22, so the ordering is an integer-grid property
    v = quantization.quant_noise_var
    assert v(b) > v(b + 1)
    assert abs(v(b) - quantization.delta_of_bits(b) ** 2 * (1 - quantization.delta_of_bits(b) ** 2)) < 1e-12


@FAST
@given(st.floats(LO - 0.2, 0.99999999), st.integers(1, 4), st.integers(4, 8))
def test_round_bits_within_bounds(d, b_min, b_max):
    b = quantization.round_bits(d, QuantizationBounds(b_min, b_max))
    assert b_min <= b.item() <= b_max


@FAST
@given(st.lists(st.integers(1, 8), min_size=1, max_size=6))
def test_power_bit_and_distortion_domains_agree(bits):
    d = quantization.delta_of_bits(np.array(bits))
    assert abs(metrics.adc_power(bits, 0.1) - metrics.adc_power_from_delta(d, 0.1)) < 1e-9 * metrics.adc_power(bits, 0.1)


@FAST
@given(SEEDS, st.integers(1, 8))
def test_rate_invariant_to_baseband_rotation(seed, b):
    rng = np.random.default_rng(seed)
    h = crandn(rng, 6, 5)
    f = crandn(rng, 5, 2) / np.sqrt(10)
    w_rf = np.exp(1j * rng.uniform(0, 2 * np.pi, (6, 3)))
    w_bb = crandn(rng, 3, 2)
    d = np.full(3, quantization.delta_of_bits(b))
    c_eps = quantization.quant_noise_cov(np.full(3, b))
    u = np.linalg.qr(crandn(rng, 2, 2))[0]
    r1 = metrics.rate(h, f, w_rf, d, w_bb, c_eps, 0.1, 2)
    r2 = metrics.rate(h, f, w_rf, d, w_bb @ u, c_eps, 0.1, 2)
    assert abs(r1 - r2) < 1e-9 * max(1.0, abs(r1))
    cov = metrics.combined_noise_cov(w_rf, d, w_bb, c_eps, 0.1)
    np.testing.assert_allclose(cov, cov.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(cov).min() > -1e-12


@FAST
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=8))
def test_waterfilling_kkt(gains):
    g = np.array(gains)
    p = baselines.waterfilling(g)
    assert abs(p.sum() - 1) < 1e-12
    assert np.all(p >= 0)
    active = p > 0
    levels = p[active] + 1 / g[active]
    np.testing.assert_allclose(levels, levels[0], rtol=0, atol=1e-9)
    # inactive modes sit above the water level
    assert np.all(1 / g[~active] >= levels[0] - 1e-9)


# -- numerics ------------------------------------------------------------------


@FAST
@given(SEEDS, st.integers(1, 6), st.integers(1, 6))
def test_svd_orthonormal_and_sorted(seed, m, n):
    a = crandn(np.random.default_rng(seed), m, n)
    u, s, v = numerics.svd(a)
    assert np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])) < 1e-9
    assert np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])) < 1e-9
    assert np.all(np.diff(s) <= 0)


@FAST
@given(SEEDS)
def test_kron_bilinear(seed):
    rng = np.random.default_rng(seed)
    a, b, c = crandn(rng, 2, 3), crandn(rng, 3, 2), crandn(rng, 3, 2)
    np.testing.assert_allclose(numerics.kron(a, b + c), numerics.kron(a, b) + numerics.kron(a, c), atol=1e-12)


@FAST
@given(st.floats(1e-3, 1e3), st.integers(1, 8))
def test_logdet_of_scaled_identity(c, n):
    assert abs(numerics.logdet2_hpd(c * np.eye(n)) - n * np.log2(c)) < 1e-9 * max(1.0, n * abs(np.log2(c)))


# -- channel and harness -------------------------------------------------------


def test_channel_normalization():
    p = ChannelParams()
    rng = np.random.default_rng(2024)
    energy = np.mean([np.linalg.norm(sample_channel(p, rng).h) ** 2 for _ in range(10_000)])
    assert abs(energy / (p.n_tx * p.n_rx) - 1) < 0.03


@settings(max_examples=5, deadline=None)
@given(SEEDS)
def test_channel_reproducible(seed):
    a = sample_channel(ChannelParams(), np.random.default_rng(seed))
    b = sample_channel(ChannelParams(), np.random.default_rng(seed))
    np.testing.assert_array_equal(a.h, b.h)


@settings(max_examples=3, deadline=None)
@given(st.integers(0, 2**63))
def test_csv_deterministic(seed):
    cfg = harness.ExperimentConfig(
        n_tx=8, n_rx=8, l_r=2, n_s=2, n_max=4, trials=2, seed=seed, schemes=("admm", "hybrid1", "digital")
    )
    a = harness.format_csv(harness.table(harness.run_trials(cfg)))
    b = harness.format_csv(harness.table(harness.run_trials(cfg)))
    assert a == b


@settings(max_examples=3, deadline=None)
@given(SEEDS)
def test_brute_force_dominates_uniform_candidates(seed):
    bounds = QuantizationBounds(1, 3)
    cfg = AdmmConfig(n_max=5, bounds=bounds)
    c = sample_channel(ChannelParams(n_tx=8, n_rx=8), np.random.default_rng(seed))
    res = baselines.brute_force(c, 2, 2, 0.01, bounds, cfg, rng=seed)
    draw = int(np.random.default_rng(seed).integers(2**63))
    for b in bounds.levels:
        fixed = baselines.fixed_bit_hybrid(c, 2, 2, b, 0.01, cfg, rng=np.random.default_rng(draw))
        assert res.eval.ee >= fixed.eval.ee - 1e-12
