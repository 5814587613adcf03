"""Throughput of naive vs planned AeConv vs standard convolution."""
from __future__ import annotations

import statistics
import time

import numpy as np

from ._accel import HAVE_NUMBA
from .aeconv import aeconv_forward_naive, aeconv_forward_planned, build_gather_plan
from .geometry import GridSpec, radial_basis_field
from .tensor import Kernel, standard_conv

BENCH_COLUMNS = ("operator", "grid", "channels", "k", "ns_per_cell")


def _median_ns(fn, repeats: int) -> float:
    fn()  # warmup (also triggers JIT compilation)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        times.append(time.perf_counter_ns() - t0)
    return statistics.median(times)


def run_bench(sizes, channels: int = 8, k: int = 3, repeats: int = 5, seed: int = 0,
              naive_max_size: int | None = None) -> list[dict]:
    """One row per (operator, size). ``naive_max_size`` skips the slow reference above that size."""
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        x = rng.standard_normal((channels, n, n))
        kern = Kernel(rng.standard_normal((channels, channels, k, k)))
        field = radial_basis_field(GridSpec.centered(n, n), (0.0, 0.0))
        plan = build_gather_plan(field, k)
        ops = {
            "standard": lambda: standard_conv(x, kern),
            "aeconv_planned_numpy": lambda: aeconv_forward_planned(x, kern, plan, backend="numpy"),
        }
        if HAVE_NUMBA:
            ops["aeconv_planned_numba"] = lambda: aeconv_forward_planned(x, kern, plan, backend="numba")
        if naive_max_size is None or n <= naive_max_size:
            ops["aeconv_naive"] = lambda: aeconv_forward_naive(x, kern, field)
        for name, fn in ops.items():
            ns = _median_ns(fn, repeats)
            rows.append(dict(operator=name, grid=f"{n}x{n}", channels=channels, k=k, ns_per_cell=ns / (n * n)))
    return rows
