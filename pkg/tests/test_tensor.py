import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aekernels import ConfigurationError, Kernel, bilinear_sample, kernel_offsets, rotate_resample, standard_conv
from conftest import brute_force_conv


def test_bilinear_exact_at_integer_position(rng):
    x = rng.standard_normal((2, 5, 6))
    assert bilinear_sample(x, 1, (2, 3)) == x[1, 2, 3]


def test_bilinear_center_of_2x2_is_mean():
    x = np.array([[[1.0, 2.0], [3.0, 4.0]]])
    assert bilinear_sample(x, 0, (0.5, 0.5)) == pytest.approx(2.5, abs=1e-15)


def test_bilinear_far_outside_is_zero(rng):
    x = rng.standard_normal((1, 4, 4)) + 10
    assert bilinear_sample(x, 0, (-5, -5)) == 0.0


def test_bilinear_bad_channel():
    with pytest.raises(ConfigurationError):
        bilinear_sample(np.zeros((1, 3, 3)), 1, (0, 0))


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(-3, 3), b=st.floats(-3, 3), c=st.floats(-3, 3),
    row=st.floats(0, 5), col=st.floats(0, 6),
)
def test_bilinear_reproduces_affine_maps(a, b, c, row, col):
    i, j = np.meshgrid(np.arange(6), np.arange(7), indexing="ij")
    x = (a * i + b * j + c)[None].astype(float)
    assert bilinear_sample(x, 0, (row, col)) == pytest.approx(a * row + b * col + c, abs=1e-12)


def test_offsets_for_3x3():
    off = kernel_offsets(3)
    assert off[0].tolist() == [-1, -1]
    assert off[1].tolist() == [-1, 0]
    assert off[-2].tolist() == [1, 0]
    assert off[-1].tolist() == [1, 1]
    assert len(off) == 9


@pytest.mark.parametrize("k", [0, 2, 4])
def test_even_or_zero_extent_rejected(k):
    with pytest.raises(ConfigurationError):
        kernel_offsets(k)


def test_rotate_zero_is_identity(rng):
    x = rng.standard_normal((3, 9, 7))
    np.testing.assert_array_equal(rotate_resample(x, 0.0, (4.0, 3.0)), x)


@pytest.mark.parametrize("quarter", [1, 2, 3, -1])
def test_rotate_quarter_turns_are_permutations(rng, quarter):
    x = rng.standard_normal((2, 11, 11))
    y = rotate_resample(x, quarter * math.pi / 2, (5.0, 5.0))
    # forward (+row) content moves to the left (+col): counter-clockwise
    expected = np.rot90(x, k=quarter, axes=(1, 2))
    assert np.abs(y - expected).max() == 0.0


def _band_limited(seed, n=41, kmax=0.1, taper=8.0):
    rng = np.random.default_rng(seed)
    c = (n - 1) / 2
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    x = np.zeros((2, n, n))
    for ch in range(2):
        for _ in range(4):
            k, d, ph = rng.uniform(0, kmax), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)
            x[ch] += np.cos(k * math.cos(d) * (i - c) + k * math.sin(d) * (j - c) + ph)
    return x * np.exp(-((i - c) ** 2 + (j - c) ** 2) / (2 * taper**2))


# Measured worst case over 30 seeds x 4 angles: 6.5e-3.
ROUNDTRIP_TOL = 1e-2


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("angle", [0.3, math.pi / 3, 2.5])
def test_rotate_roundtrip_on_smooth_input(seed, angle):
    x = _band_limited(seed)
    y = rotate_resample(rotate_resample(x, angle, (20.0, 20.0)), -angle, (20.0, 20.0))
    i, j = np.meshgrid(np.arange(41), np.arange(41), indexing="ij")
    m = np.hypot(i - 20, j - 20) <= 18
    rel = np.linalg.norm((y - x)[:, m]) / np.linalg.norm(x[:, m])
    assert rel <= ROUNDTRIP_TOL


def test_identity_1x1_conv(rng):
    x = rng.standard_normal((4, 6, 5))
    np.testing.assert_array_equal(standard_conv(x, Kernel.identity(4)), x)


def test_zero_kernel(rng):
    x = rng.standard_normal((2, 5, 5))
    assert not standard_conv(x, Kernel(np.zeros((3, 2, 3, 3)))).any()


@pytest.mark.parametrize("k", [1, 3, 5])
def test_conv_matches_brute_force(rng, k):
    x = rng.standard_normal((2, 5, 5))
    w = rng.standard_normal((3, 2, k, k))
    assert np.abs(standard_conv(x, Kernel(w)) - brute_force_conv(x, w)).max() <= 1e-12


def test_conv_linear_in_input_and_weights(rng):
    x1, x2 = rng.standard_normal((2, 3, 7, 7))
    w1, w2 = rng.standard_normal((2, 2, 3, 3, 3))
    a, b = 1.7, -0.4
    k1 = Kernel(w1)
    lhs = standard_conv(a * x1 + b * x2, k1)
    assert np.abs(lhs - (a * standard_conv(x1, k1) + b * standard_conv(x2, k1))).max() <= 1e-12
    lhs = standard_conv(x1, Kernel(a * w1 + b * w2))
    assert np.abs(lhs - (a * standard_conv(x1, k1) + b * standard_conv(x1, Kernel(w2)))).max() <= 1e-12


def test_conv_channel_mismatch():
    with pytest.raises(ConfigurationError):
        standard_conv(np.zeros((2, 4, 4)), Kernel(np.zeros((1, 3, 3, 3))))


def test_feature_map_rejects_nan():
    x = np.zeros((1, 3, 3))
    x[0, 1, 1] = np.nan
    with pytest.raises(ConfigurationError):
        standard_conv(x, Kernel.identity(1))
