"""Dense feature maps, bilinear sampling, rotation resampling and the
standard (regular-grid) convolution.

A feature map is a float64 ``ndarray`` of shape ``(channels, height, width)``.
Axis 1 runs ego-forward, axis 2 ego-left; planar positions are ``(row, col)``
pairs in cell units.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


def as_feature_map(x, name: str = "map") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 3:
        raise ConfigurationError(f"{name} must be (channels, height, width), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class Kernel:
    """Convolution weights of shape ``(out_channels, in_channels, k, k)``.

    Tap ``(a, b)`` of the centered integer grid lives at
    ``weights[:, :, a + r, b + r]`` with ``r = (k - 1) // 2``.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 4 or w.shape[2] != w.shape[3]:
            raise ConfigurationError(f"kernel weights must be (out, in, k, k), got {w.shape}")
        if w.shape[2] % 2 != 1:
            raise ConfigurationError(f"kernel extent must be odd, got {w.shape[2]}")
        if not np.all(np.isfinite(w)):
            raise ConfigurationError("kernel weights contain non-finite values")
        object.__setattr__(self, "weights", w)

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def k(self) -> int:
        return self.weights.shape[2]

    @property
    def radius(self) -> int:
        return (self.k - 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        return kernel_offsets(self.k)

    def flat(self) -> np.ndarray:
        """Weights as ``(out, in, k*k)`` in the tap order of :attr:`offsets`."""
        return self.weights.reshape(self.out_channels, self.in_channels, self.k * self.k)

    @classmethod
    def random(cls, out_channels: int, in_channels: int, k: int = 3, seed=None) -> "Kernel":
        rng = np.random.default_rng(seed)
        return cls(rng.standard_normal((out_channels, in_channels, k, k)))

    @classmethod
    def identity(cls, channels: int) -> "Kernel":
        return cls(np.eye(channels).reshape(channels, channels, 1, 1))


def kernel_offsets(k: int) -> np.ndarray:
    """Regular sampling grid as a ``(k*k, 2)`` int array, row-major over taps.

    For ``k=3`` this is ``(-1,-1), (-1,0), ..., (0,1), (1,1)``.
    """
    if k < 1 or k % 2 != 1:
        raise ConfigurationError(f"kernel extent must be a positive odd integer, got {k}")
    r = (k - 1) // 2
    a, b = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
    return np.stack([a.ravel(), b.ravel()], axis=1)


def sample_all_channels(data: np.ndarray, row: float, col: float) -> np.ndarray:
    """Bilinear value of every channel at one position; zero outside the map."""
    _, h, w = data.shape
    r0 = int(np.floor(row))
    c0 = int(np.floor(col))
    fr = row - r0
    fc = col - c0
    out = np.zeros(data.shape[0])
    for dr, wr in ((0, 1.0 - fr), (1, fr)):
        rr = r0 + dr
        if rr < 0 or rr >= h:
            continue
        for dc, wc in ((0, 1.0 - fc), (1, fc)):
            cc = c0 + dc
            if cc < 0 or cc >= w:
                continue
            out += (wr * wc) * data[:, rr, cc]
    return out


def bilinear_sample(fmap, channel: int, pos) -> float:
    """Bilinear interpolation of ``fmap[channel]`` at ``pos = (row, col)``.

    Cells outside the map read as zero, so far-away positions return 0.
    """
    fmap = np.asarray(fmap, dtype=np.float64)
    if not 0 <= channel < fmap.shape[0]:
        raise ConfigurationError(f"channel {channel} out of range for {fmap.shape[0]} channels")
    return float(sample_all_channels(fmap[channel : channel + 1], float(pos[0]), float(pos[1]))[0])


def bilinear_grid(data: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Vectorised bilinear sampling of all channels at arrays of positions."""
    c, h, w = data.shape
    r0 = np.floor(rows).astype(np.int64)
    c0 = np.floor(cols).astype(np.int64)
    fr = rows - r0
    fc = cols - c0
    out = np.zeros((c,) + np.shape(rows))
    for dr, wr in ((0, 1.0 - fr), (1, fr)):
        rr = r0 + dr
        for dc, wc in ((0, 1.0 - fc), (1, fc)):
            cc = c0 + dc
            valid = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
            vals = data[:, np.where(valid, rr, 0), np.where(valid, cc, 0)]
            out += np.where(valid, wr * wc, 0.0) * vals
    return out


def rotation_matrix(angle: float) -> np.ndarray:
    """Counter-clockwise rotation in the (forward, left) plane.

    Entries within 1e-15 of 0 or +-1 are snapped so quarter turns are exact.
    """
    c, s = np.cos(angle), np.sin(angle)
    m = np.array([[c, -s], [s, c]])
    snapped = np.round(m)
    close = np.abs(m - snapped) < 1e-15
    m[close] = snapped[close]
    return m


def rotate_resample(fmap, angle: float, center) -> np.ndarray:
    """Rotate map content by ``angle`` (counter-clockwise) about ``center``.

    ``out(p) = sample(in, R(-angle) (p - center) + center)``.
    """
    fmap = as_feature_map(fmap)
    if not np.isfinite(angle):
        raise ConfigurationError("angle must be finite")
    _, h, w = fmap.shape
    rows, cols = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    inv = rotation_matrix(-angle)
    dr = rows - center[0]
    dc = cols - center[1]
    src_r = inv[0, 0] * dr + inv[0, 1] * dc + center[0]
    src_c = inv[1, 0] * dr + inv[1, 1] * dc + center[1]
    return bilinear_grid(fmap, src_r, src_c)


def standard_conv(fmap, kernel: Kernel) -> np.ndarray:
    """Same-size, stride-1, zero-padded cross-correlation on the regular grid."""
    fmap = as_feature_map(fmap)
    if kernel.in_channels != fmap.shape[0]:
        raise ConfigurationError(
            f"kernel expects {kernel.in_channels} input channels, map has {fmap.shape[0]}"
        )
    _, h, w = fmap.shape
    r = kernel.radius
    padded = np.pad(fmap, ((0, 0), (r, r), (r, r)))
    out = np.zeros((kernel.out_channels, h, w))
    for a in range(kernel.k):
        for b in range(kernel.k):
            window = padded[:, a : a + h, b : b + w]
            out += np.einsum("oc,chw->ohw", kernel.weights[:, :, a, b], window)
    return out
