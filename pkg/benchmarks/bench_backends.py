"""Compare the numba and pure-numpy gather/scatter paths of planned AeConv.

    python benchmarks/bench_backends.py --sizes 32,64,128 --channels 16
"""
import argparse
import statistics
import time

import numpy as np

from aekernels import GridSpec, Kernel, aeconv_backward, aeconv_forward_planned, build_gather_plan, radial_basis_field
from aekernels._accel import HAVE_NUMBA


def timeit(fn, repeats):
    fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="32,64,128")
    ap.add_argument("--channels", type=int, default=16)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba unavailable (or AEKERNELS_DISABLE_NUMBA set); nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'grid':>9} {'pass':>8} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        c = args.channels
        x = rng.standard_normal((c, n, n))
        kern = Kernel(rng.standard_normal((c, c, 3, 3)))
        up = rng.standard_normal((c, n, n))
        plan = build_gather_plan(radial_basis_field(GridSpec.centered(n, n), (0.0, 0.0)), 3)
        for label, fn in (
            ("forward", lambda b: aeconv_forward_planned(x, kern, plan, b)),
            ("backward", lambda b: aeconv_backward(x, kern, plan, up, b)),
        ):
            t_np = timeit(lambda: fn("numpy"), args.repeats)
            t_nb = timeit(lambda: fn("numba"), args.repeats)
            print(f"{n:>4}x{n:<4} {label:>8} {1e3 * t_np:>10.2f} {1e3 * t_nb:>10.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
