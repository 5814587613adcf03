"""Gather/scatter inner loops behind the planned AeConv.

Each kernel exists twice: a numba version and a pure-numpy version. The
module-level names dispatch to whichever backend ``_accel`` selected; both
are importable directly for benchmarks and cross-checks.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit


def gather_columns_numpy(x_flat, idx, wts):
    # (C, HW, K, 4) -> (C, K, HW)
    sampled = (x_flat[:, idx] * wts).sum(axis=-1)
    return np.ascontiguousarray(sampled.transpose(0, 2, 1))


def scatter_columns_numpy(gcols, idx, wts, n_cells):
    c = gcols.shape[0]
    contrib = gcols.transpose(0, 2, 1)[..., None] * wts
    flat_idx = idx.ravel()
    out = np.empty((c, n_cells))
    for ch in range(c):
        out[ch] = np.bincount(flat_idx, weights=contrib[ch].ravel(), minlength=n_cells)
    return out


def _gather_columns_loop(x_flat, idx, wts):
    c_in = x_flat.shape[0]
    n_cells, n_taps, _ = idx.shape
    cols = np.empty((c_in, n_taps, n_cells))
    # channel outermost: every pass reads one contiguous plane
    for c in range(c_in):
        plane = x_flat[c]
        for t in range(n_taps):
            for q in range(n_cells):
                cols[c, t, q] = (wts[q, t, 0] * plane[idx[q, t, 0]] + wts[q, t, 1] * plane[idx[q, t, 1]]
                                 + wts[q, t, 2] * plane[idx[q, t, 2]] + wts[q, t, 3] * plane[idx[q, t, 3]])
    return cols


def _scatter_columns_loop(gcols, idx, wts, n_cells):
    c_in = gcols.shape[0]
    n_out, n_taps, _ = idx.shape
    out = np.zeros((c_in, n_cells))
    for c in range(c_in):
        for t in range(n_taps):
            for q in range(n_out):
                g = gcols[c, t, q]
                for n in range(4):
                    out[c, idx[q, t, n]] += wts[q, t, n] * g
    return out


if HAVE_NUMBA:
    gather_columns_numba = njit(cache=True)(_gather_columns_loop)
    scatter_columns_numba = njit(cache=True)(_scatter_columns_loop)
    gather_columns = gather_columns_numba
    scatter_columns = scatter_columns_numba
else:
    gather_columns_numba = None
    scatter_columns_numba = None
    gather_columns = gather_columns_numpy
    scatter_columns = scatter_columns_numpy


def select(backend=None):
    """``(gather, scatter)`` for ``backend`` in {None, "numba", "numpy"}."""
    if backend is None:
        return gather_columns, scatter_columns
    if backend == "numpy":
        return gather_columns_numpy, scatter_columns_numpy
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable or disabled")
        return gather_columns_numba, scatter_columns_numba
    raise ValueError(f"unknown backend {backend!r}")
