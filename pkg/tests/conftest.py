import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def brute_force_conv(x, w):
    """Zero-padded same-size cross-correlation by explicit index arithmetic."""
    c_in, h, wd = x.shape
    c_out, _, k, _ = w.shape
    r = k // 2
    out = np.zeros((c_out, h, wd))
    for o in range(c_out):
        for i in range(h):
            for j in range(wd):
                s = 0.0
                for c in range(c_in):
                    for a in range(k):
                        for b in range(k):
                            ii, jj = i + a - r, j + b - r
                            if 0 <= ii < h and 0 <= jj < wd:
                                s += w[o, c, a, b] * x[c, ii, jj]
                out[o, i, j] = s
    return out


def bilinear_by_hand(x, row, col):
    """Textbook bilinear interpolation of a 2-D array with zero outside."""
    h, w = x.shape

    def at(i, j):
        return x[i, j] if 0 <= i < h and 0 <= j < w else 0.0

    i0, j0 = int(np.floor(row)), int(np.floor(col))
    t, u = row - i0, col - j0
    return ((1 - t) * (1 - u) * at(i0, j0) + (1 - t) * u * at(i0, j0 + 1)
            + t * (1 - u) * at(i0 + 1, j0) + t * u * at(i0 + 1, j0 + 1))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
