import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdsmod import channel


def test_snr_to_n0():
    assert channel.snr_to_n0(0) == 1.0
    assert channel.snr_to_n0(20) == pytest.approx(0.01)
    assert np.allclose(channel.snr_to_n0([10, 30]), [0.1, 1e-3])


def test_complex_normal_moments():
    z = channel.complex_normal(np.random.default_rng(3), 200_000, 2.0)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(2.0, rel=0.02)
    assert abs(np.mean(z)) < 0.02
    assert abs(np.mean(z * z)) < 0.02  # circular symmetry
    assert np.var(z.real) == pytest.approx(1.0, rel=0.02)


def test_realization_and_noise_shapes():
    rng = np.random.default_rng(0)
    assert channel.sample_realization(rng, (5, 3)).shape == (5, 3)
    assert channel.sample_noise(rng, 4, 0.1).shape == (4,)
    with pytest.raises(ValueError):
        channel.sample_noise(rng, 4, 0.0)


def test_apply():
    s = np.array([1, 1j])
    h = np.array([2, 3])
    assert channel.apply(s, h, np.zeros(2)).tolist() == [2, 3j]
    with pytest.raises(ValueError):
        channel.apply(s, h, np.zeros(3))


@given(st.integers(0, 2**32), st.integers(0, 100), st.integers(0, 100))
def test_derive_rng_deterministic_and_distinct(seed, a, b):
    x = channel.derive_rng(seed, a, b).random(4)
    assert np.array_equal(x, channel.derive_rng(seed, a, b).random(4))
    assert not np.array_equal(x, channel.derive_rng(seed, a, b + 1).random(4))
    assert not np.array_equal(x, channel.derive_rng(seed + 1, a, b).random(4))
