"""Virtual depth bins and their remapping onto a fixed real-depth layout."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, CoverageError


@dataclass(frozen=True)
class VirtualDepthSpec:
    """``bins`` uniform bins over ``[0, max_depth]`` at virtual focal ``focal``."""

    bins: int = 180
    max_depth: float = 54.0
    focal: float = 800.0

    def __post_init__(self):
        if self.bins < 1:
            raise ConfigurationError("virtual bin count must be >= 1")
        if not (self.max_depth > 0 and self.focal > 0):
            raise ConfigurationError("virtual depth range and focal length must be positive")

    @property
    def bin_size(self) -> float:
        return self.max_depth / self.bins


@dataclass(frozen=True)
class FixedDepthSpec:
    """Uniform bins of width ``step`` over ``[near, far]``."""

    near: float = 2.0
    far: float = 54.0
    step: float = 0.5

    def __post_init__(self):
        if not (0 <= self.near < self.far):
            raise ConfigurationError("fixed depth range needs 0 <= near < far")
        if not self.step > 0:
            raise ConfigurationError("fixed bin size must be positive")
        n = (self.far - self.near) / self.step
        if abs(n - round(n)) > 1e-9 or round(n) < 1:
            raise ConfigurationError(f"fixed range {self.far - self.near} m is not a whole number of {self.step} m bins")

    @property
    def bins(self) -> int:
        return int(round((self.far - self.near) / self.step))


def real_focal(fx: float, fy: float) -> float:
    """Root-mean-square of the two focal lengths."""
    if not (fx > 0 and fy > 0):
        raise ConfigurationError(f"focal lengths must be positive, got fx={fx}, fy={fy}")
    return math.sqrt((fx * fx + fy * fy) / 2.0)


def real_bin_size(vspec: VirtualDepthSpec, f_real: float) -> float:
    if not f_real > 0:
        raise ConfigurationError(f"real focal length must be positive, got {f_real}")
    if f_real < vspec.focal:
        raise CoverageError(
            f"real focal {f_real} px is below the virtual focal {vspec.focal} px; "
            f"mapped range {vspec.bins * vspec.bin_size * f_real / vspec.focal:.4g} m "
            f"would not reach {vspec.max_depth} m"
        )
    return (f_real / vspec.focal) * vspec.bin_size


def fractional_indices(fspec: FixedDepthSpec, real_bin: float) -> np.ndarray:
    """Position of each fixed bin on the virtual bin grid."""
    i = np.arange(fspec.bins)
    return (fspec.near + i * fspec.step) / real_bin


def map_scores(scores, fspec: FixedDepthSpec, real_bin: float) -> np.ndarray:
    """Linearly interpolate virtual-bin scores at each fixed bin's depth.

    ``scores`` may be 1-D (M,) or batched (..., M). Raises
    :class:`CoverageError` rather than extrapolating.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim == 0 or s.shape[-1] < 1:
        raise ConfigurationError("score vector must have at least one bin")
    if not np.all(np.isfinite(s)):
        raise ConfigurationError("score vector contains non-finite values")
    if not real_bin > 0:
        raise ConfigurationError(f"real bin size must be positive, got {real_bin}")
    m = s.shape[-1]
    if m * real_bin < fspec.far * (1 - 1e-12):
        raise CoverageError(f"mapped range {m * real_bin:.6g} m does not cover {fspec.far} m")
    u = fractional_indices(fspec, real_bin)
    # tolerance absorbs representation error of u at an exact last-bin hit
    if u[-1] > (m - 1) + 1e-9:
        raise CoverageError(
            f"fixed bin at {fspec.near + (fspec.bins - 1) * fspec.step} m reads virtual index "
            f"{u[-1]:.6g}, past the last bin {m - 1}"
        )
    u = np.minimum(u, m - 1)
    lo = np.minimum(np.floor(u).astype(np.int64), max(m - 2, 0))
    frac = u - lo
    hi = np.minimum(lo + 1, m - 1)
    return (1.0 - frac) * s[..., lo] + frac * s[..., hi]


def map_scores_for_camera(scores, fx: float, fy: float, vspec: VirtualDepthSpec, fspec: FixedDepthSpec) -> np.ndarray:
    return map_scores(scores, fspec, real_bin_size(vspec, real_focal(fx, fy)))


def bin_centers(spec: VirtualDepthSpec | FixedDepthSpec) -> np.ndarray:
    if isinstance(spec, VirtualDepthSpec):
        return (np.arange(spec.bins) + 0.5) * spec.bin_size
    return spec.near + (np.arange(spec.bins) + 0.5) * spec.step
