"""Azimuth-equivariant convolution.

Every tap ``p = (a, b)`` of the regular grid is placed at ``q + a*e_r + b*e_o``
where ``(e_r, e_o)`` is the radial/tangential basis at output cell ``q``;
the feature there is read by bilinear interpolation and weighted by the
canonical ``w(p)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigurationError
from .geometry import GridSpec, RadialBasisField
from .tensor import Kernel, as_feature_map, kernel_offsets, sample_all_channels


def _check_field(fmap: np.ndarray, kernel: Kernel, field: RadialBasisField) -> None:
    if kernel.in_channels != fmap.shape[0]:
        raise ConfigurationError(
            f"kernel expects {kernel.in_channels} input channels, map has {fmap.shape[0]}"
        )
    if field.shape != fmap.shape[1:]:
        raise ConfigurationError(f"field {field.shape} does not match map {fmap.shape[1:]}")


def aeconv_forward_naive(fmap, kernel: Kernel, field: RadialBasisField) -> np.ndarray:
    """Direct evaluation, one bilinear read per (cell, tap). Reference only."""
    fmap = as_feature_map(fmap)
    _check_field(fmap, kernel, field)
    _, h, w = fmap.shape
    offsets = kernel.offsets
    wflat = kernel.flat()
    out = np.zeros((kernel.out_channels, h, w))
    for i in range(h):
        for j in range(w):
            er = field.e_r[i, j]
            eo = field.e_o[i, j]
            acc = np.zeros(kernel.out_channels)
            for t, (a, b) in enumerate(offsets):
                row = i + a * er[0] + b * eo[0]
                col = j + a * er[1] + b * eo[1]
                acc += wflat[:, :, t] @ sample_all_channels(fmap, row, col)
            out[:, i, j] = acc
    return out


@dataclass(frozen=True)
class GatherPlan:
    """Precomputed bilinear taps: ``index``/``weight`` are ``(H*W, k*k, 4)``.

    Neighbours outside the map carry index 0 and weight 0.
    """

    index: np.ndarray
    weight: np.ndarray
    height: int
    width: int
    k: int

    @property
    def n_cells(self) -> int:
        return self.height * self.width


def build_gather_plan(field: RadialBasisField, k: int, grid: GridSpec | None = None) -> GatherPlan:
    h, w = field.shape
    if grid is not None and (grid.height, grid.width) != (h, w):
        raise ConfigurationError(f"field {field.shape} does not match grid {(grid.height, grid.width)}")
    offsets = kernel_offsets(k).astype(np.float64)
    a = offsets[:, 0]
    b = offsets[:, 1]
    i, j = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    er = field.e_r.reshape(-1, 1, 2)
    eo = field.e_o.reshape(-1, 1, 2)
    # (HW, K) sampling positions; same arithmetic order as the naive path
    rows = i.reshape(-1, 1) + a * er[..., 0] + b * eo[..., 0]
    cols = j.reshape(-1, 1) + a * er[..., 1] + b * eo[..., 1]
    r0 = np.floor(rows).astype(np.int64)
    c0 = np.floor(cols).astype(np.int64)
    fr = rows - r0
    fc = cols - c0
    index = np.zeros(rows.shape + (4,), dtype=np.int64)
    weight = np.zeros(rows.shape + (4,))
    n = 0
    for dr, wr in ((0, 1.0 - fr), (1, fr)):
        rr = r0 + dr
        for dc, wc in ((0, 1.0 - fc), (1, fc)):
            cc = c0 + dc
            valid = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
            index[..., n] = np.where(valid, rr * w + cc, 0)
            weight[..., n] = np.where(valid, wr * wc, 0.0)
            n += 1
    return GatherPlan(index, weight, h, w, k)


def _check_plan(fmap: np.ndarray, kernel: Kernel, plan: GatherPlan) -> None:
    if kernel.in_channels != fmap.shape[0]:
        raise ConfigurationError(
            f"kernel expects {kernel.in_channels} input channels, map has {fmap.shape[0]}"
        )
    if (plan.height, plan.width) != fmap.shape[1:]:
        raise ConfigurationError(f"plan {(plan.height, plan.width)} does not match map {fmap.shape[1:]}")
    if plan.k != kernel.k:
        raise ConfigurationError(f"plan built for k={plan.k}, kernel has k={kernel.k}")


def sampled_columns(fmap, plan: GatherPlan, backend: str | None = None) -> np.ndarray:
    """Bilinear samples ``(C, k*k, H*W)`` for every tap of every cell."""
    gather, _ = _kernels.select(backend)
    x_flat = np.ascontiguousarray(fmap.reshape(fmap.shape[0], -1))
    return gather(x_flat, plan.index, plan.weight)


def aeconv_forward_planned(fmap, kernel: Kernel, plan: GatherPlan, backend: str | None = None) -> np.ndarray:
    fmap = as_feature_map(fmap)
    _check_plan(fmap, kernel, plan)
    cols = sampled_columns(fmap, plan, backend)
    w2 = kernel.weights.reshape(kernel.out_channels, -1)
    out = w2 @ cols.reshape(w2.shape[1], -1)
    return out.reshape(kernel.out_channels, plan.height, plan.width)


def aeconv_backward(fmap, kernel: Kernel, plan: GatherPlan, upstream_grad, backend: str | None = None):
    """Adjoint of the forward map. Returns ``(input_grad, weight_grad)``."""
    fmap = as_feature_map(fmap)
    _check_plan(fmap, kernel, plan)
    up = as_feature_map(upstream_grad, "upstream_grad")
    if up.shape != (kernel.out_channels, plan.height, plan.width):
        raise ConfigurationError(
            f"upstream gradient {up.shape} does not match output "
            f"{(kernel.out_channels, plan.height, plan.width)}"
        )
    _, scatter = _kernels.select(backend)
    up2 = up.reshape(kernel.out_channels, -1)
    w2 = kernel.weights.reshape(kernel.out_channels, -1)
    cols = sampled_columns(fmap, plan, backend)
    weight_grad = (up2 @ cols.reshape(w2.shape[1], -1).T).reshape(kernel.weights.shape)
    gcols = np.ascontiguousarray((w2.T @ up2).reshape(kernel.in_channels, kernel.k * kernel.k, -1))
    input_grad = scatter(gcols, plan.index, plan.weight, plan.n_cells)
    return input_grad.reshape(fmap.shape), weight_grad
