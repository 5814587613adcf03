"""Revolving test on synthetic BEV scenes.

A scene is rendered twice, once as-is and once with every blob moved by the
same azimuth offset (analytic re-rendering, no resampling). An operator is
equivariant when its response to the rotated scene equals its response to
the original scene rotated afterwards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .aeconv import GatherPlan, aeconv_forward_planned, build_gather_plan
from .errors import ConfigurationError
from .geometry import GridSpec, RadialBasisField, radial_basis_field
from .tensor import Kernel, rotate_resample, standard_conv


@dataclass(frozen=True)
class Blob:
    range: float
    azimuth: float
    amplitude: float
    width: float
    channel: int = 0


@dataclass(frozen=True)
class SyntheticScene:
    """Isotropic Gaussian blobs placed in polar coordinates about ``center`` (meters)."""

    blobs: tuple[Blob, ...]
    grid: GridSpec
    channels: int = 1
    center: tuple[float, float] = (0.0, 0.0)
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "blobs", tuple(self.blobs))
        half_extent = 0.5 * min(self.grid.height, self.grid.width) * self.grid.resolution
        for b in self.blobs:
            if not b.width > 0:
                raise ConfigurationError(f"blob width must be positive, got {b.width}")
            if not 0 <= b.range <= half_extent:
                raise ConfigurationError(f"blob range {b.range} m outside grid extent {half_extent} m")
            if not 0 <= b.channel < self.channels:
                raise ConfigurationError(f"blob channel {b.channel} out of range")

    @classmethod
    def random(
        cls,
        grid: GridSpec,
        seed: int,
        channels: int = 8,
        blobs_per_channel: int = 3,
        range_limits=(2.0, 6.0),
        width_limits=(0.75, 1.25),
        center=(0.0, 0.0),
    ) -> "SyntheticScene":
        rng = np.random.default_rng(seed)
        blobs = [
            Blob(
                range=float(rng.uniform(*range_limits)),
                azimuth=float(rng.uniform(-math.pi, math.pi)),
                amplitude=float(rng.uniform(0.5, 1.5)),
                width=float(rng.uniform(*width_limits)),
                channel=ch,
            )
            for ch in range(channels)
            for _ in range(blobs_per_channel)
        ]
        return cls(tuple(blobs), grid, channels, tuple(center), seed)

    def rotated(self, angle: float) -> "SyntheticScene":
        """Same scene with every blob moved ``angle`` radians counter-clockwise."""
        return replace(self, blobs=tuple(replace(b, azimuth=b.azimuth + angle) for b in self.blobs))


def synth_scene(scene: SyntheticScene) -> np.ndarray:
    pts = scene.grid.cell_centers()
    out = np.zeros((scene.channels, scene.grid.height, scene.grid.width))
    cx, cy = scene.center
    for b in scene.blobs:
        bx = cx + b.range * math.cos(b.azimuth)
        by = cy + b.range * math.sin(b.azimuth)
        d2 = (pts[..., 0] - bx) ** 2 + (pts[..., 1] - by) ** 2
        out[b.channel] += b.amplitude * np.exp(-d2 / (2.0 * b.width**2))
    return out


def interior_mask(field: RadialBasisField, center_cell, margin: int) -> np.ndarray:
    """Cells inside the largest centred disk that stays ``margin`` cells off
    every edge, minus the degenerate centre cell."""
    h, w = field.shape
    ci, cj = float(center_cell[0]), float(center_cell[1])
    radius = min(ci, cj, h - 1 - ci, w - 1 - cj) - margin
    i, j = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    return (np.hypot(i - ci, j - cj) <= radius) & ~field.degenerate


def masked_discrepancy(actual: np.ndarray, expected: np.ndarray, mask: np.ndarray) -> tuple[float, float]:
    """``(relative L2, max abs)`` of ``actual - expected`` over masked cells."""
    diff = (actual - expected)[:, mask]
    ref = np.linalg.norm(actual[:, mask])
    l2 = float(np.linalg.norm(diff))
    rel = l2 / ref if ref > 0 else l2
    return rel, float(np.max(np.abs(diff), initial=0.0))


@dataclass(frozen=True)
class RevolveReport:
    angle: float
    aeconv_rel_l2: float
    standard_rel_l2: float
    max_abs_aeconv: float
    max_abs_standard: float
    interior_margin: int
    resample_rel_l2: float
    max_abs_resample: float

    def rows(self) -> list[dict]:
        deg = round(math.degrees(self.angle), 9)
        return [
            dict(angle_deg=deg, operator="aeconv", rel_l2=self.aeconv_rel_l2,
                 max_abs=self.max_abs_aeconv, interior_margin=self.interior_margin),
            dict(angle_deg=deg, operator="standard", rel_l2=self.standard_rel_l2,
                 max_abs=self.max_abs_standard, interior_margin=self.interior_margin),
            dict(angle_deg=deg, operator="resample", rel_l2=self.resample_rel_l2,
                 max_abs=self.max_abs_resample, interior_margin=self.interior_margin),
        ]


def run_revolve(
    scene: SyntheticScene,
    kernel: Kernel,
    angle: float,
    field: RadialBasisField | None = None,
    plan: GatherPlan | None = None,
) -> RevolveReport:
    if not math.isfinite(angle):
        raise ConfigurationError("angle must be finite")
    if kernel.in_channels != scene.channels:
        raise ConfigurationError(f"kernel expects {kernel.in_channels} channels, scene has {scene.channels}")
    if field is None:
        field = radial_basis_field(scene.grid, scene.center)
    if plan is None:
        plan = build_gather_plan(field, kernel.k, scene.grid)
    center_cell = scene.grid.to_cell(scene.center)
    margin = kernel.radius + 1
    mask = interior_mask(field, center_cell, margin)

    original = synth_scene(scene)
    turned = synth_scene(scene.rotated(angle))

    res_rel, res_max = masked_discrepancy(turned, rotate_resample(original, angle, center_cell), mask)
    ae_rel, ae_max = masked_discrepancy(
        aeconv_forward_planned(turned, kernel, plan),
        rotate_resample(aeconv_forward_planned(original, kernel, plan), angle, center_cell),
        mask,
    )
    st_rel, st_max = masked_discrepancy(
        standard_conv(turned, kernel),
        rotate_resample(standard_conv(original, kernel), angle, center_cell),
        mask,
    )
    return RevolveReport(angle, ae_rel, st_rel, ae_max, st_max, margin, res_rel, res_max)
