"""Azimuth-equivariant anchor targets.

Center offsets and velocities are projected onto the anchor's radial and
tangential directions; orientation is stored relative to the azimuth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GridSpec, RadialBasisField, azimuth_of
from .tensor import rotation_matrix

TWO_PI = 2.0 * math.pi


def wrap_angle(theta):
    """Wrap to (-pi, pi]. Works on scalars and arrays."""
    if np.ndim(theta) == 0:
        r = math.remainder(float(theta), TWO_PI)
        return math.pi if r <= -math.pi else r
    t = np.asarray(theta, dtype=np.float64)
    r = np.remainder(t + math.pi, TWO_PI) - math.pi
    return np.where(r <= -math.pi, math.pi, r)


@dataclass(frozen=True)
class BoxState:
    x: float
    y: float
    z: float
    l: float
    w: float
    h: float
    theta: float
    vx: float = 0.0
    vy: float = 0.0

    FIELDS = ("x", "y", "z", "l", "w", "h", "theta", "vx", "vy")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in self.FIELDS)


@dataclass(frozen=True)
class ResidualState:
    dr: float
    do: float
    dz: float
    dl: float
    dw: float
    dh: float
    dtheta: float
    vr: float
    vo: float

    FIELDS = ("dr", "do", "dz", "dl", "dw", "dh", "dtheta", "vr", "vo")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in self.FIELDS)


@dataclass(frozen=True)
class AzimuthAnchor:
    """Anchor at ``(x, y, z)`` with size ``(l, w, h)`` oriented along azimuth ``alpha``.

    ``e_r``/``e_o`` are the radial/tangential unit vectors at the location.
    With zero size this is the implicit anchor of a centre-based head.
    """

    x: float
    y: float
    z: float
    l: float
    w: float
    h: float
    alpha: float
    e_r: tuple[float, float]
    e_o: tuple[float, float]

    @property
    def implicit(self) -> bool:
        return self.l == 0.0 and self.w == 0.0 and self.h == 0.0


def anchor_at_point(location, center, z: float = 0.0, size=(0.0, 0.0, 0.0)) -> AzimuthAnchor:
    """Anchor at an arbitrary ego point, basis derived from ``location - center``."""
    dx = float(location[0]) - float(center[0])
    dy = float(location[1]) - float(center[1])
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        er = (1.0, 0.0)
    else:
        er = (dx / norm, dy / norm)
    alpha = azimuth_of(location, center)
    return AzimuthAnchor(float(location[0]), float(location[1]), z, *size, alpha, er, (-er[1], er[0]))


def anchor_at_cell(grid: GridSpec, field: RadialBasisField, cell, z: float = 0.0, size=(0.0, 0.0, 0.0)) -> AzimuthAnchor:
    """Anchor at a grid cell, sharing that cell's basis with AeConv."""
    i, j = int(cell[0]), int(cell[1])
    x, y = grid.to_ego((i, j))
    er = tuple(float(v) for v in field.e_r[i, j])
    eo = tuple(float(v) for v in field.e_o[i, j])
    return AzimuthAnchor(float(x), float(y), z, *size, float(field.alpha[i, j]), er, eo)


def encode(box: BoxState, anchor: AzimuthAnchor) -> ResidualState:
    er, eo = anchor.e_r, anchor.e_o
    dx = box.x - anchor.x
    dy = box.y - anchor.y
    return ResidualState(
        dr=er[0] * dx + er[1] * dy,
        do=eo[0] * dx + eo[1] * dy,
        dz=box.z - anchor.z,
        dl=box.l - anchor.l,
        dw=box.w - anchor.w,
        dh=box.h - anchor.h,
        dtheta=wrap_angle(box.theta - anchor.alpha),
        vr=er[0] * box.vx + er[1] * box.vy,
        vo=eo[0] * box.vx + eo[1] * box.vy,
    )


def decode(res: ResidualState, anchor: AzimuthAnchor) -> BoxState:
    er, eo = anchor.e_r, anchor.e_o
    return BoxState(
        x=anchor.x + res.dr * er[0] + res.do * eo[0],
        y=anchor.y + res.dr * er[1] + res.do * eo[1],
        z=anchor.z + res.dz,
        l=anchor.l + res.dl,
        w=anchor.w + res.dw,
        h=anchor.h + res.dh,
        theta=wrap_angle(res.dtheta + anchor.alpha),
        vx=res.vr * er[0] + res.vo * eo[0],
        vy=res.vr * er[1] + res.vo * eo[1],
    )


def rotate_point(point, angle: float, center=(0.0, 0.0)) -> np.ndarray:
    c = np.asarray(center, dtype=np.float64)
    return rotation_matrix(angle) @ (np.asarray(point, dtype=np.float64) - c) + c


def rotate_box(box: BoxState, angle: float, center=(0.0, 0.0)) -> BoxState:
    """Rigidly rotate a box (position, heading, velocity) about ``center``."""
    x, y = rotate_point((box.x, box.y), angle, center)
    vx, vy = rotation_matrix(angle) @ np.array([box.vx, box.vy])
    return BoxState(float(x), float(y), box.z, box.l, box.w, box.h,
                    wrap_angle(box.theta + angle), float(vx), float(vy))
