"""Camera rig, BEV grid and the per-cell radial/tangential basis.

Ego frame: x forward, y left, azimuth measured from +x toward +y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Camera:
    name: str
    x: float
    y: float
    yaw: float
    fx: float
    fy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ConfigurationError(f"camera {self.name!r}: focal lengths must be positive")


@dataclass(frozen=True)
class CameraRig:
    cameras: tuple[Camera, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "cameras", tuple(self.cameras))

    def center(self) -> np.ndarray:
        return rig_center(self)


@dataclass(frozen=True)
class GridSpec:
    """BEV grid; ``origin`` is the ego position (meters) of the centre of cell (0, 0)."""

    height: int
    width: int
    resolution: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ConfigurationError("grid dimensions must be positive")
        if not self.resolution > 0:
            raise ConfigurationError("grid resolution must be positive")

    @classmethod
    def centered(cls, height: int, width: int, resolution: float = 1.0) -> "GridSpec":
        """Grid whose middle (cell or corner) sits on the ego origin."""
        return cls(height, width, resolution, (-(height - 1) / 2 * resolution, -(width - 1) / 2 * resolution))

    def cell_centers(self) -> np.ndarray:
        """``(height, width, 2)`` ego coordinates of cell centres."""
        i, j = np.meshgrid(np.arange(self.height), np.arange(self.width), indexing="ij")
        return np.stack([self.origin[0] + i * self.resolution, self.origin[1] + j * self.resolution], axis=-1)

    def to_cell(self, point) -> np.ndarray:
        """Continuous (row, col) of an ego-frame point."""
        p = np.asarray(point, dtype=np.float64)
        return (p - np.asarray(self.origin)) / self.resolution

    def to_ego(self, cell) -> np.ndarray:
        c = np.asarray(cell, dtype=np.float64)
        return np.asarray(self.origin) + c * self.resolution


@dataclass(frozen=True)
class RadialBasisField:
    """Per-cell azimuth ``alpha`` (H, W) with radial ``e_r`` and tangential
    ``e_o`` unit vectors (H, W, 2). ``degenerate`` flags the centre cell."""

    alpha: np.ndarray
    e_r: np.ndarray
    e_o: np.ndarray
    degenerate: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.alpha.shape

    @classmethod
    def uniform(cls, height: int, width: int, alpha: float = 0.0) -> "RadialBasisField":
        """Same azimuth everywhere; ``alpha=0`` gives the ego axes at every cell."""
        a = np.full((height, width), float(alpha))
        if alpha == 0.0:
            er = np.array([1.0, 0.0])
        else:
            er = np.array([math.cos(alpha), math.sin(alpha)])
        e_r = np.broadcast_to(er, (height, width, 2)).copy()
        return cls(a, e_r, _rot90(e_r), np.zeros((height, width), dtype=bool))


def _rot90(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def rig_center(rig: CameraRig) -> np.ndarray:
    if not rig.cameras:
        raise ConfigurationError("camera rig is empty")
    xy = np.array([[c.x, c.y] for c in rig.cameras])
    return xy.mean(axis=0)


def azimuth_of(point, center) -> float:
    """Angle of ``point - center`` from ego-forward toward ego-left, in (-pi, pi].

    Coincident points get azimuth 0.
    """
    dx = float(point[0]) - float(center[0])
    dy = float(point[1]) - float(center[1])
    if dx == 0.0 and dy == 0.0:
        return 0.0
    a = math.atan2(dy, dx)
    return math.pi if a == -math.pi else a


def radial_basis_field(grid: GridSpec, center) -> RadialBasisField:
    c = grid.to_cell(center)
    i, j = np.meshgrid(np.arange(grid.height, dtype=np.float64), np.arange(grid.width, dtype=np.float64), indexing="ij")
    # Directions in cell units: identical to meters for a square grid, and exact
    # for integer-aligned centres.
    d = np.stack([i - c[0], j - c[1]], axis=-1)
    norm = np.hypot(d[..., 0], d[..., 1])
    degenerate = norm < 1e-9
    safe = np.where(degenerate, 1.0, norm)
    e_r = d / safe[..., None]
    e_r[degenerate] = (1.0, 0.0)
    alpha = np.arctan2(d[..., 1], d[..., 0])
    alpha[alpha == -np.pi] = np.pi
    alpha[degenerate] = 0.0
    return RadialBasisField(alpha, e_r, _rot90(e_r), degenerate)


def parse_rig(text: str, source: str = "<rig>") -> CameraRig:
    """Parse ``camera <name> x=.. y=.. yaw=.. fx=.. fy=..`` lines."""
    required = ("x", "y", "yaw", "fx", "fy")
    cameras = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "camera" or len(parts) < 2:
            raise ConfigurationError(f"{source}:{lineno}: expected 'camera <name> key=value ...'")
        values = {}
        for tok in parts[2:]:
            key, sep, val = tok.partition("=")
            if not sep:
                raise ConfigurationError(f"{source}:{lineno}: malformed field {tok!r}")
            if key not in required:
                raise ConfigurationError(f"{source}:{lineno}: unknown field {key!r}")
            if key in values:
                raise ConfigurationError(f"{source}:{lineno}: duplicate field {key!r}")
            try:
                values[key] = float(val)
            except ValueError:
                raise ConfigurationError(f"{source}:{lineno}: {key} is not a number: {val!r}") from None
        missing = [k for k in required if k not in values]
        if missing:
            raise ConfigurationError(f"{source}:{lineno}: missing {', '.join(missing)}")
        try:
            cameras.append(Camera(parts[1], **values))
        except ConfigurationError as exc:
            raise ConfigurationError(f"{source}:{lineno}: {exc}") from None
    if not cameras:
        raise ConfigurationError(f"{source}: no cameras defined")
    return CameraRig(tuple(cameras))


def read_rig(path) -> CameraRig:
    path = Path(path)
    return parse_rig(path.read_text(), source=str(path))
