import numpy as np
import pytest

from hybridadc.channel import (
    ChannelParams,
    ChannelRealization,
    array_response_ula,
    assemble_channel,
    optimal_combiner,
    optimal_precoder,
    sample_channel,
)
from hybridadc.exceptions import InvalidInputError


def test_array_response_broadside():
    np.testing.assert_allclose(array_response_ula(5, 0.0), np.ones(5) / np.sqrt(5))


def test_array_response_endfire_two_elements():
    np.testing.assert_allclose(array_response_ula(2, np.pi / 2, 0.5), np.array([1, -1]) / np.sqrt(2), atol=1e-15)


@pytest.mark.parametrize("n,phi", [(1, 0.3), (16, 1.1), (33, -2.0)])
def test_array_response_unit_norm(n, phi):
    assert abs(np.linalg.norm(array_response_ula(n, phi)) - 1) < 1e-12


def test_sample_shape_rank_and_reassembly(rng):
    p = ChannelParams()
    c = sample_channel(p, rng)
    assert c.h.shape == (16, 32)
    assert np.linalg.matrix_rank(c.h, tol=1e-9 * c.s[0]) <= 8
    np.testing.assert_allclose(assemble_channel(p, c.gains, c.aod, c.aoa), c.h, atol=1e-12)
    assert np.all(np.diff(c.s) <= 0) and c.s[-1] >= 0


def test_sample_is_reproducible():
    p = ChannelParams()
    a = sample_channel(p, np.random.default_rng(9))
    b = sample_channel(p, np.random.default_rng(9))
    np.testing.assert_array_equal(a.h, b.h)
    c = sample_channel(p, np.random.default_rng(10))
    assert not np.allclose(a.h, c.h)


def test_channel_power_normalization():
    # E||H||_F^2 = N_T N_R for unit cluster power
    p = ChannelParams()
    rng = np.random.default_rng(2)
    energy = np.mean([np.linalg.norm(sample_channel(p, rng).h) ** 2 for _ in range(10_000)])
    assert abs(energy / (p.n_tx * p.n_rx) - 1) < 0.03


def test_optimal_combiner_and_precoder(rng):
    c = sample_channel(ChannelParams(), rng)
    w = optimal_combiner(c, 4)
    f = optimal_precoder(c, 4)
    assert w.shape == (16, 4) and f.shape == (32, 4)
    np.testing.assert_allclose(w.conj().T @ w, np.eye(4), atol=1e-12)
    assert np.linalg.norm(f) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_optimal_vectors_diagonal_channel():
    h = np.zeros((4, 5))
    h[:3, :3] = np.diag([3.0, 2.0, 1.0])
    c = ChannelRealization.from_matrix(h)
    w = optimal_combiner(c, 2)
    f = optimal_precoder(c, 2)
    np.testing.assert_allclose(np.abs(w), np.eye(4)[:, :2], atol=1e-12)
    np.testing.assert_allclose(np.abs(f), np.eye(5)[:, :2] / np.sqrt(2), atol=1e-12)


def test_stream_count_checked(rng):
    c = sample_channel(ChannelParams(n_rx=4, n_tx=8), rng)
    with pytest.raises(InvalidInputError):
        optimal_combiner(c, 5)
    with pytest.raises(InvalidInputError):
        optimal_precoder(c, 0)


def test_params_validation():
    with pytest.raises(InvalidInputError):
        ChannelParams(n_rx=0)
    with pytest.raises(InvalidInputError):
        ChannelParams(cluster_power=(1.0,))
    with pytest.raises(InvalidInputError):
        ChannelParams(element_spacing=0)
