"""Flat ``key=value`` run configuration."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .depth import FixedDepthSpec, VirtualDepthSpec
from .errors import ConfigurationError
from .geometry import CameraRig, GridSpec, read_rig, rig_center


@dataclass(frozen=True)
class RunConfig:
    height: int = 33
    width: int = 33
    resolution: float = 0.5
    # None centres the grid on the ego origin
    origin_x: float | None = None
    origin_y: float | None = None
    rig: str | None = None
    kernel_extent: int = 3
    kernel_seed: int = 0
    kernel_weights: str | None = None
    in_channels: int = 8
    out_channels: int = 8
    depth_bins: int = 180
    virtual_depth: float = 54.0
    virtual_focal: float = 800.0
    fixed_near: float = 2.0
    fixed_far: float = 54.0
    fixed_step: float = 0.5
    anchor_z: float = 0.0
    anchor_l: float = 0.0
    anchor_w: float = 0.0
    anchor_h: float = 0.0
    seed: int = 0
    output_dir: str = "."
    tol_exact: float = 1e-12
    tol_equivariance: float = 1e-9
    tol_gradient: float = 1e-5
    tol_adjoint: float = 1e-10
    fd_step: float = 1e-5
    resample_factor: float = 2.0
    roundoff_floor: float = 1e-12

    def __post_init__(self):
        for name in ("height", "width", "kernel_extent", "in_channels", "out_channels", "depth_bins"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.kernel_extent % 2 != 1:
            raise ConfigurationError("kernel_extent must be odd")
        for f in fields(self):
            if f.name.startswith(("tol_", "virtual_", "fixed_step", "resolution", "fd_step", "resample_factor", "roundoff_floor")):
                if not getattr(self, f.name) > 0:
                    raise ConfigurationError(f"{f.name} must be positive")
        if self.anchor_l < 0 or self.anchor_w < 0 or self.anchor_h < 0:
            raise ConfigurationError("anchor sizes must be non-negative")

    def grid(self) -> GridSpec:
        g = GridSpec.centered(self.height, self.width, self.resolution)
        ox = g.origin[0] if self.origin_x is None else self.origin_x
        oy = g.origin[1] if self.origin_y is None else self.origin_y
        return GridSpec(self.height, self.width, self.resolution, (ox, oy))

    def camera_rig(self) -> CameraRig | None:
        return read_rig(self.rig) if self.rig else None

    def azimuth_center(self) -> np.ndarray:
        rig = self.camera_rig()
        return rig_center(rig) if rig is not None else np.zeros(2)

    def virtual_spec(self) -> VirtualDepthSpec:
        return VirtualDepthSpec(self.depth_bins, self.virtual_depth, self.virtual_focal)

    def fixed_spec(self) -> FixedDepthSpec:
        return FixedDepthSpec(self.fixed_near, self.fixed_far, self.fixed_step)

    def with_overrides(self, pairs) -> "RunConfig":
        return replace(self, **_coerce(dict(pairs), "<override>"))


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_PATH_KEYS = ("rig", "kernel_weights", "output_dir")


def _coerce(raw: dict, source: str) -> dict:
    out = {}
    for key, value in raw.items():
        if key not in _TYPES:
            raise ConfigurationError(f"{source}: unknown key {key!r}")
        t = _TYPES[key]
        try:
            if t == "int":
                out[key] = int(value)
            elif t in ("float", "float | None"):
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError:
            raise ConfigurationError(f"{source}: {key}={value!r} is not a valid {t}") from None
    return out


def parse_pairs(lines, source: str = "<config>") -> dict:
    raw = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{source}:{lineno}: expected key=value")
        key = key.strip()
        if key in raw:
            raise ConfigurationError(f"{source}:{lineno}: duplicate key {key!r}")
        if key not in _TYPES:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        raw[key] = value.strip()
    return raw


def load_config(path=None) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    raw = parse_pairs(path.read_text().splitlines(), str(path))
    # relative paths resolve against the config file's directory
    for key in _PATH_KEYS:
        if key in raw and raw[key] and not Path(raw[key]).is_absolute():
            raw[key] = str(path.parent / raw[key])
    return RunConfig(**_coerce(raw, str(path)))
