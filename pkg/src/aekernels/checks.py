"""Named property checks run by ``aekernels check`` and the acceptance tests."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import anchor as ac
from .aeconv import aeconv_backward, aeconv_forward_naive, aeconv_forward_planned, build_gather_plan
from .config import RunConfig
from .depth import FixedDepthSpec, VirtualDepthSpec, map_scores, real_bin_size, real_focal
from .errors import CoverageError
from .geometry import GridSpec, RadialBasisField, radial_basis_field
from .revolve import SyntheticScene, run_revolve
from .tensor import Kernel, rotate_resample, standard_conv


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} (tol {self.tolerance:.1e}) {self.detail}".rstrip()


def _instances(seed: int, n: int, shape, out_channels: int, k: int):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        x = rng.standard_normal(shape)
        w = rng.standard_normal((out_channels, shape[0], k, k))
        yield x, Kernel(w)


def check_reduction(cfg: RunConfig) -> list[CheckResult]:
    """AeConv with a zero azimuth everywhere is the standard convolution."""
    t0 = time.perf_counter()
    plan = build_gather_plan(RadialBasisField.uniform(32, 32), 3)
    worst = 0.0
    for x, kern in _instances(cfg.seed + 1, 20, (8, 32, 32), 8, 3):
        worst = max(worst, float(np.abs(aeconv_forward_planned(x, kern, plan) - standard_conv(x, kern)).max()))
    dt = time.perf_counter() - t0
    return [
        CheckResult("reduction_zero_azimuth", worst <= cfg.tol_exact, worst, cfg.tol_exact, dt),
        CheckResult("reduction_runtime_seconds", dt < 5.0, dt, 5.0, dt),
    ]


def check_plan_equivalence(cfg: RunConfig) -> list[CheckResult]:
    t0 = time.perf_counter()
    field = radial_basis_field(GridSpec.centered(32, 32), (0.0, 0.0))
    plan = build_gather_plan(field, 3)
    worst = 0.0
    for x, kern in _instances(cfg.seed + 1, 20, (8, 32, 32), 8, 3):
        naive = aeconv_forward_naive(x, kern, field)
        worst = max(worst, float(np.abs(aeconv_forward_planned(x, kern, plan) - naive).max()))
    return [CheckResult("plan_equals_naive", worst <= cfg.tol_exact, worst, cfg.tol_exact, time.perf_counter() - t0)]


def _quarter_turn_residual(x, kern, plan, field, center_cell) -> float:
    a = aeconv_forward_planned(rotate_resample(x, math.pi / 2, center_cell), kern, plan)
    b = rotate_resample(aeconv_forward_planned(x, kern, plan), math.pi / 2, center_cell)
    mask = np.zeros(field.shape, dtype=bool)
    mask[1:-1, 1:-1] = True
    mask &= ~field.degenerate
    return float(np.abs((a - b)[:, mask]).max())


def check_quarter_turn(cfg: RunConfig) -> list[CheckResult]:
    t0 = time.perf_counter()
    grid = GridSpec.centered(33, 33)
    field = radial_basis_field(grid, (0.0, 0.0))
    plan = build_gather_plan(field, 3)
    center_cell = grid.to_cell((0.0, 0.0))
    worst = 0.0
    for x, kern in _instances(cfg.seed + 3, 10, (4, 33, 33), 4, 3):
        worst = max(worst, _quarter_turn_residual(x, kern, plan, field, center_cell))
    return [CheckResult("equivariance_90deg", worst <= cfg.tol_equivariance, worst, cfg.tol_equivariance,
                        time.perf_counter() - t0)]


REVOLVE_ANGLES_DEG = (30.0, 60.0, 90.0, 120.0)


def revolve_grid() -> GridSpec:
    return GridSpec.centered(41, 41, 0.5)


def check_revolve(cfg: RunConfig, n_kernels: int = 10, n_scenes: int = 2) -> list[CheckResult]:
    """AeConv commutes with rotation up to interpolation error; standard conv does not."""
    t0 = time.perf_counter()
    grid = revolve_grid()
    field = radial_basis_field(grid, (0.0, 0.0))
    plan = build_gather_plan(field, 3)
    scenes = [SyntheticScene.random(grid, seed=cfg.seed + 100 + s, channels=8) for s in range(n_scenes)]
    rng = np.random.default_rng(cfg.seed + 4)
    kernels = [Kernel(rng.standard_normal((8, 8, 3, 3))) for _ in range(n_kernels)]
    worst_ratio = 0.0
    worst_gap = math.inf
    failures = []
    for deg in REVOLVE_ANGLES_DEG:
        for s, scene in enumerate(scenes):
            for n, kern in enumerate(kernels):
                rep = run_revolve(scene, kern, math.radians(deg), field, plan)
                tol = cfg.resample_factor * rep.resample_rel_l2 + cfg.roundoff_floor
                worst_ratio = max(worst_ratio, rep.aeconv_rel_l2 / tol)
                worst_gap = min(worst_gap, rep.standard_rel_l2 - rep.aeconv_rel_l2)
                if rep.aeconv_rel_l2 > tol or not rep.aeconv_rel_l2 < rep.standard_rel_l2:
                    failures.append(f"{deg:g}deg/scene{s}/kernel{n}")
    dt = time.perf_counter() - t0
    detail = ("failing: " + ", ".join(failures[:5])) if failures else ""
    return [
        CheckResult("revolve_within_resample_tolerance", worst_ratio <= 1.0, worst_ratio, 1.0, dt, detail),
        CheckResult("revolve_aeconv_beats_standard", worst_gap > 0.0, worst_gap, 0.0, dt),
    ]


def _loss(x, kern, plan) -> float:
    y = aeconv_forward_planned(x, kern, plan)
    return float(np.sum(y * y))


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b) / denom)


def finite_difference_gradients(x, kern, plan, step):
    """Central differences of ``sum(out**2)`` in every input and weight entry."""
    gx = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xp[idx] += step
        xm = x.copy()
        xm[idx] -= step
        gx[idx] = (_loss(xp, kern, plan) - _loss(xm, kern, plan)) / (2 * step)
    gw = np.zeros_like(kern.weights)
    for idx in np.ndindex(gw.shape):
        wp = kern.weights.copy()
        wp[idx] += step
        wm = kern.weights.copy()
        wm[idx] -= step
        gw[idx] = (_loss(x, Kernel(wp), plan) - _loss(x, Kernel(wm), plan)) / (2 * step)
    return gx, gw


def check_gradients(cfg: RunConfig) -> list[CheckResult]:
    t0 = time.perf_counter()
    field = radial_basis_field(GridSpec.centered(8, 8), (0.0, 0.0))
    plan = build_gather_plan(field, 3)
    rng = np.random.default_rng(cfg.seed + 5)
    worst_in = worst_w = worst_adj = 0.0
    for x, kern in _instances(cfg.seed + 5, 10, (2, 8, 8), 2, 3):
        y = aeconv_forward_planned(x, kern, plan)
        gx, gw = aeconv_backward(x, kern, plan, 2.0 * y)
        fx, fw = finite_difference_gradients(x, kern, plan, cfg.fd_step)
        worst_in = max(worst_in, _rel(gx, fx))
        worst_w = max(worst_w, _rel(gw, fw))
        u = rng.standard_normal(y.shape)
        ux, uw = aeconv_backward(x, kern, plan, u)
        lhs = float(np.sum(y * u))
        worst_adj = max(
            worst_adj,
            abs(lhs - float(np.sum(x * ux))) / max(abs(lhs), 1e-300),
            abs(lhs - float(np.sum(kern.weights * uw))) / max(abs(lhs), 1e-300),
        )
    dt = time.perf_counter() - t0
    return [
        CheckResult("gradient_input_fd", worst_in <= cfg.tol_gradient, worst_in, cfg.tol_gradient, dt),
        CheckResult("gradient_weight_fd", worst_w <= cfg.tol_gradient, worst_w, cfg.tol_gradient, dt),
        CheckResult("adjoint_dot_product", worst_adj <= cfg.tol_adjoint, worst_adj, cfg.tol_adjoint, dt),
    ]


def random_box(rng, extent: float = 50.0) -> ac.BoxState:
    return ac.BoxState(
        x=rng.uniform(-extent, extent), y=rng.uniform(-extent, extent), z=rng.uniform(-2, 2),
        l=rng.uniform(0, 6), w=rng.uniform(0, 3), h=rng.uniform(0, 3),
        theta=rng.uniform(-math.pi, math.pi), vx=rng.uniform(-15, 15), vy=rng.uniform(-15, 15),
    )


def random_anchor(rng, center, extent: float = 50.0) -> ac.AzimuthAnchor:
    loc = (rng.uniform(-extent, extent), rng.uniform(-extent, extent))
    size = (0.0, 0.0, 0.0) if rng.random() < 0.5 else tuple(rng.uniform(0, 5, size=3))
    return ac.anchor_at_point(loc, center, z=rng.uniform(-1, 1), size=size)


def residual_distance(a: ac.ResidualState, b: ac.ResidualState) -> float:
    """Max componentwise difference; the angle is compared modulo 2*pi."""
    d = [abs(getattr(a, f) - getattr(b, f)) for f in ac.ResidualState.FIELDS if f != "dtheta"]
    d.append(abs(ac.wrap_angle(a.dtheta - b.dtheta)))
    return max(d)


def box_distance(a: ac.BoxState, b: ac.BoxState) -> float:
    d = [abs(getattr(a, f) - getattr(b, f)) for f in ac.BoxState.FIELDS if f != "theta"]
    d.append(abs(ac.wrap_angle(a.theta - b.theta)))
    return max(d)


def check_anchor_codec(cfg: RunConfig) -> list[CheckResult]:
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed + 6)
    worst_rt = 0.0
    for _ in range(1000):
        center = rng.uniform(-2, 2, size=2)
        box = random_box(rng)
        anc = random_anchor(rng, center)
        worst_rt = max(worst_rt, box_distance(ac.decode(ac.encode(box, anc), anc), box))
    worst_eq = 0.0
    for _ in range(100):
        center = rng.uniform(-2, 2, size=2)
        delta = rng.uniform(-2 * math.pi, 2 * math.pi)
        box = random_box(rng)
        loc = rng.uniform(-50, 50, size=2)
        size = tuple(rng.uniform(0, 5, size=3))
        base = ac.encode(box, ac.anchor_at_point(loc, center, size=size))
        turned = ac.encode(
            ac.rotate_box(box, delta, center),
            ac.anchor_at_point(ac.rotate_point(loc, delta, center), center, size=size),
        )
        worst_eq = max(worst_eq, residual_distance(base, turned))
    dt = time.perf_counter() - t0
    return [
        CheckResult("codec_roundtrip", worst_rt <= cfg.tol_exact, worst_rt, cfg.tol_exact, dt),
        CheckResult("codec_rotation_equivariance", worst_eq <= cfg.tol_exact, worst_eq, cfg.tol_exact, dt),
    ]


def check_depth(cfg: RunConfig) -> list[CheckResult]:
    t0 = time.perf_counter()
    tol = cfg.tol_exact
    vspec = VirtualDepthSpec(cfg.depth_bins, cfg.virtual_depth, cfg.virtual_focal)
    fspec = FixedDepthSpec(cfg.fixed_near, cfg.fixed_far, cfg.fixed_step)
    rng = np.random.default_rng(cfg.seed + 7)
    results = [CheckResult("depth_fixed_bin_count", fspec.bins == 104, float(fspec.bins), 104.0)]

    d_r = real_bin_size(vspec, real_focal(800.0, 800.0))
    s_v = rng.standard_normal(vspec.bins)
    s_f = map_scores(s_v, fspec, d_r)
    err = abs(s_f[0] - (s_v[6] / 3.0 + 2.0 * s_v[7] / 3.0))
    results.append(CheckResult("depth_first_bin_interpolation", err <= tol, err, tol))

    a = map_scores(s_v, fspec, real_bin_size(vspec, real_focal(900.0, 1200.0)))
    b = map_scores(s_v, fspec, real_bin_size(vspec, real_focal(1200.0, 900.0)))
    rms = real_focal(900.0, 1200.0)
    fy = math.sqrt(2 * rms * rms - 1000.0**2)
    c = map_scores(s_v, fspec, real_bin_size(vspec, real_focal(1000.0, fy)))
    err = max(float(np.abs(a - b).max()), float(np.abs(a - c).max()))
    results.append(CheckResult("depth_rms_focal_invariance", err <= tol, err, tol))

    worst_const = 0.0
    worst_convex = 0.0
    for _ in range(100):
        fx, fy = rng.uniform(800, 2000, size=2)
        d_r = real_bin_size(vspec, real_focal(fx, fy))
        const = rng.uniform(-10, 10)
        worst_const = max(worst_const, float(np.abs(map_scores(np.full(vspec.bins, const), fspec, d_r) - const).max()))
        s_v = rng.standard_normal(vspec.bins)
        s_f = map_scores(s_v, fspec, d_r)
        u = (fspec.near + np.arange(fspec.bins) * fspec.step) / d_r
        lo = np.floor(u).astype(int)
        hi = np.minimum(lo + 1, vspec.bins - 1)
        below = np.minimum(s_v[lo], s_v[hi]) - s_f
        above = s_f - np.maximum(s_v[lo], s_v[hi])
        worst_convex = max(worst_convex, float(np.max(below)), float(np.max(above)))
    results.append(CheckResult("depth_constant_preserved", worst_const <= tol, worst_const, tol))
    results.append(CheckResult("depth_convex_combination", worst_convex <= tol, max(worst_convex, 0.0), tol))

    try:
        real_bin_size(vspec, vspec.focal - 1.0)
        rejected = False
    except CoverageError:
        rejected = True
    results.append(CheckResult("depth_low_focal_rejected", rejected, float(rejected), 1.0))
    dt = time.perf_counter() - t0
    for r in results:
        r.seconds = dt
    return results


ALL_CHECKS = (
    ("1 reduction oracle", check_reduction),
    ("2 gather-plan equivalence", check_plan_equivalence),
    ("3 exact 90deg equivariance", check_quarter_turn),
    ("4 revolving test", check_revolve),
    ("5 gradient correctness", check_gradients),
    ("6 anchor codec", check_anchor_codec),
    ("7 depth mapping", check_depth),
)


def run_all(cfg: RunConfig | None = None) -> list[CheckResult]:
    cfg = cfg or RunConfig()
    results = []
    for _, fn in ALL_CHECKS:
        results.extend(fn(cfg))
    return results
