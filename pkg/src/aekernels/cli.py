"""Command line entry point: ``aekernels <command> ...``."""
from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import anchor as ac
from .aeconv import aeconv_forward_planned, build_gather_plan
from .bench import BENCH_COLUMNS, run_bench
from .checks import ALL_CHECKS, REVOLVE_ANGLES_DEG, revolve_grid
from .config import RunConfig, load_config, parse_pairs
from .depth import map_scores_for_camera
from .errors import ConfigurationError, CoverageError, FormatError
from .formats import (BOX_COLUMNS, RESIDUAL_COLUMNS, read_rows, read_score_matrix, read_tensor,
                      write_rows, write_score_matrix, write_tensor)
from .geometry import RadialBasisField, radial_basis_field
from .revolve import SyntheticScene, run_revolve
from .tensor import Kernel, as_feature_map, standard_conv

REVOLVE_COLUMNS = ("angle_deg", "operator", "rel_l2", "max_abs", "interior_margin")
CHECK_COLUMNS = ("criterion", "check", "passed", "value", "tolerance", "seconds", "detail")


def _out_path(cfg: RunConfig, path) -> Path:
    p = Path(path)
    if not p.is_absolute() and p.parent == Path("."):
        p = Path(cfg.output_dir) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _field(cfg: RunConfig) -> RadialBasisField:
    return radial_basis_field(cfg.grid(), cfg.azimuth_center())


def _kernel(cfg: RunConfig, in_channels: int) -> Kernel:
    if cfg.kernel_weights:
        w = read_tensor(cfg.kernel_weights)
        if w.ndim != 4:
            raise ConfigurationError(f"{cfg.kernel_weights}: kernel weights must be rank 4, got {w.ndim}")
        return Kernel(w)
    return Kernel.random(cfg.out_channels, in_channels, cfg.kernel_extent, seed=cfg.kernel_seed)


def _nearest_cell(cfg: RunConfig, x: float, y: float) -> tuple[int, int]:
    i, j = np.rint(cfg.grid().to_cell((x, y))).astype(int)
    return int(np.clip(i, 0, cfg.height - 1)), int(np.clip(j, 0, cfg.width - 1))


def cmd_field(cfg, args) -> int:
    field = _field(cfg)
    write_tensor(field.alpha[None], _out_path(cfg, "alpha.aebf"))
    write_tensor(np.moveaxis(field.e_r, -1, 0), _out_path(cfg, "e_r.aebf"))
    print(f"wrote alpha.aebf and e_r.aebf to {cfg.output_dir}")
    return 0


def cmd_conv(cfg, args) -> int:
    x = as_feature_map(read_tensor(args.input), str(args.input))
    kern = _kernel(cfg, x.shape[0])
    if args.operator == "standard":
        y = standard_conv(x, kern)
    else:
        if args.zero_azimuth:
            field = RadialBasisField.uniform(x.shape[1], x.shape[2])
        else:
            if x.shape[1:] != (cfg.height, cfg.width):
                raise ConfigurationError(f"input grid {x.shape[1:]} does not match config {(cfg.height, cfg.width)}")
            field = _field(cfg)
        y = aeconv_forward_planned(x, kern, build_gather_plan(field, kern.k))
    write_tensor(y, _out_path(cfg, args.output))
    return 0


def _anchor_for_cell(cfg, grid, field, cell):
    return ac.anchor_at_cell(grid, field, cell, z=cfg.anchor_z, size=(cfg.anchor_l, cfg.anchor_w, cfg.anchor_h))


def cmd_encode(cfg, args) -> int:
    grid, field = cfg.grid(), _field(cfg)
    rows = []
    for rec in read_rows(args.input, BOX_COLUMNS):
        box = ac.BoxState(**rec)
        cell = _nearest_cell(cfg, box.x, box.y)
        res = ac.encode(box, _anchor_for_cell(cfg, grid, field, cell))
        rows.append(dict(i=cell[0], j=cell[1], **{f: getattr(res, f) for f in ac.ResidualState.FIELDS}))
    write_rows(_out_path(cfg, args.output), RESIDUAL_COLUMNS, rows)
    return 0


def cmd_decode(cfg, args) -> int:
    grid, field = cfg.grid(), _field(cfg)
    rows = []
    for rec in read_rows(args.input, RESIDUAL_COLUMNS):
        i, j = int(rec.pop("i")), int(rec.pop("j"))
        if not (0 <= i < cfg.height and 0 <= j < cfg.width):
            raise ConfigurationError(f"anchor cell ({i}, {j}) outside the grid")
        box = ac.decode(ac.ResidualState(**rec), _anchor_for_cell(cfg, grid, field, (i, j)))
        rows.append({f: getattr(box, f) for f in BOX_COLUMNS})
    write_rows(_out_path(cfg, args.output), BOX_COLUMNS, rows)
    return 0


def cmd_mapdepth(cfg, args) -> int:
    scores = read_score_matrix(args.input)
    vspec, fspec = cfg.virtual_spec(), cfg.fixed_spec()
    if scores.shape[1] != vspec.bins:
        raise ConfigurationError(f"{args.input}: {scores.shape[1]} scores per row, config has {vspec.bins} bins")
    fixed = map_scores_for_camera(scores, args.fx, args.fy, vspec, fspec)
    write_score_matrix(_out_path(cfg, args.output), fixed, "f")
    return 0


def cmd_check(cfg, args) -> int:
    rows = []
    ok = True
    t0 = time.perf_counter()
    for label, fn in ALL_CHECKS:
        for r in fn(cfg):
            ok &= r.passed
            print(f"{label:<28} {r.line()}")
            rows.append(dict(criterion=label, check=r.name, passed=int(r.passed), value=r.value,
                             tolerance=r.tolerance, seconds=r.seconds, detail=r.detail))
    elapsed = time.perf_counter() - t0
    print(f"{'all checks passed' if ok else 'CHECKS FAILED'} in {elapsed:.1f}s")
    write_rows(_out_path(cfg, args.report), CHECK_COLUMNS, rows)
    return 0 if ok else 1


def cmd_revolve(cfg, args) -> int:
    grid = revolve_grid()
    field = radial_basis_field(grid, (0.0, 0.0))
    plan = build_gather_plan(field, cfg.kernel_extent)
    scene = SyntheticScene.random(grid, seed=cfg.seed, channels=cfg.in_channels)
    rng = np.random.default_rng(cfg.kernel_seed)
    rows = []
    for n in range(args.kernels):
        kern = Kernel(rng.standard_normal((cfg.out_channels, cfg.in_channels, cfg.kernel_extent, cfg.kernel_extent)))
        for deg in args.angles:
            rep = run_revolve(scene, kern, math.radians(deg), field, plan)
            for row in rep.rows():
                row["kernel"] = n
                rows.append(row)
    write_rows(_out_path(cfg, args.output), REVOLVE_COLUMNS + ("kernel",), rows)
    return 0


def cmd_bench(cfg, args) -> int:
    rows = run_bench(args.sizes, channels=cfg.in_channels, k=cfg.kernel_extent,
                     repeats=args.repeats, seed=cfg.seed, naive_max_size=args.naive_max_size)
    for r in rows:
        print(f"{r['operator']:<22} {r['grid']:>9} {r['ns_per_cell']:>14.1f} ns/cell")
    write_rows(_out_path(cfg, args.output), BENCH_COLUMNS, rows)
    return 0


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aekernels", description=__doc__)
    p.add_argument("-c", "--config", help="key=value config file")
    p.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("field", help="write azimuth and radial-basis tensors").set_defaults(func=cmd_field)

    s = sub.add_parser("conv", help="apply AeConv or standard convolution to a tensor")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--operator", choices=("aeconv", "standard"), default="aeconv")
    s.add_argument("--zero-azimuth", action="store_true", help="use alpha=0 at every cell")
    s.set_defaults(func=cmd_conv)

    for name, fn, helptext in (("encode", cmd_encode, "boxes CSV -> residuals CSV"),
                               ("decode", cmd_decode, "residuals CSV -> boxes CSV")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("input")
        s.add_argument("output")
        s.set_defaults(func=fn)

    s = sub.add_parser("map-depth", help="map virtual depth scores to fixed bins")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--fx", type=float, required=True)
    s.add_argument("--fy", type=float, required=True)
    s.set_defaults(func=cmd_mapdepth)

    s = sub.add_parser("check", help="run the property suite")
    s.add_argument("--report", default="check_report.csv")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("revolve", help="revolving test report")
    s.add_argument("--angles", type=_float_list, default=list(REVOLVE_ANGLES_DEG))
    s.add_argument("--kernels", type=int, default=1)
    s.add_argument("--output", default="revolve.csv")
    s.set_defaults(func=cmd_revolve)

    s = sub.add_parser("bench", help="naive vs planned AeConv throughput")
    s.add_argument("--sizes", type=_int_list, default=[16, 32, 64])
    s.add_argument("--repeats", type=int, default=5)
    s.add_argument("--naive-max-size", type=int, default=None)
    s.add_argument("--output", default="bench.csv")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "repeats", 5) < 5:
        print("aekernels bench: error: --repeats must be at least 5", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        if args.set:
            cfg = cfg.with_overrides(parse_pairs(args.set, "--set"))
        return args.func(cfg, args)
    except (ConfigurationError, CoverageError, FormatError, OSError) as exc:
        print(f"aekernels {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
