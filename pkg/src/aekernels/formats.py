"""AEBF tensor files and the CSV schemas used by the command line.

AEBF layout (little-endian): ``b"AEBF"``, u16 version (1), u8 rank (>= 1),
``rank`` x u32 dims, then ``prod(dims)`` float32 values, last dim fastest.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .anchor import BoxState, ResidualState
from .errors import ConfigurationError, FormatError

MAGIC = b"AEBF"
VERSION = 1
_HEADER = struct.Struct("<4sHB")
MAX_ELEMENTS = 1 << 31

BOX_COLUMNS = BoxState.FIELDS
RESIDUAL_COLUMNS = ("i", "j") + ResidualState.FIELDS


def write_tensor(array, path) -> None:
    arr = np.asarray(array, dtype=np.float64)
    if arr.ndim < 1:
        raise ConfigurationError("tensor rank must be at least 1")
    if arr.ndim > 255 or any(d >= 1 << 32 for d in arr.shape):
        raise ConfigurationError(f"shape {arr.shape} not representable in AEBF")
    if not np.all(np.abs(arr) <= np.finfo(np.float32).max):
        raise ConfigurationError("tensor has values that are non-finite at 32-bit precision")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def parse_tensor(buf: bytes) -> np.ndarray:
    if len(buf) < _HEADER.size:
        raise FormatError("truncated header", len(buf))
    magic, version, rank = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    if rank == 0:
        raise FormatError("rank must be at least 1", 6)
    dims_end = _HEADER.size + 4 * rank
    if len(buf) < dims_end:
        raise FormatError(f"truncated dims, expected {rank} entries", len(buf))
    dims = struct.unpack_from(f"<{rank}I", buf, _HEADER.size)
    count = 1
    for n, d in enumerate(dims):
        count *= d
        if count > MAX_ELEMENTS:
            raise FormatError(f"dims {dims} overflow the {MAX_ELEMENTS}-element limit", _HEADER.size + 4 * n)
    expected = dims_end + 4 * count
    if len(buf) < expected:
        raise FormatError(f"truncated payload, expected {4 * count} bytes", len(buf))
    if len(buf) > expected:
        raise FormatError(f"{len(buf) - expected} trailing bytes after payload", expected)
    data = np.frombuffer(buf, dtype="<f4", count=count, offset=dims_end)
    return data.astype(np.float64).reshape(dims)


def read_tensor(path) -> np.ndarray:
    return parse_tensor(Path(path).read_bytes())


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows(path, columns, rows) -> None:
    """Write dict rows; floats use shortest round-trip repr."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def read_rows(path, columns) -> list[dict]:
    """Read a CSV whose header must equal ``columns``; values parsed as float."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ConfigurationError(f"{path}: empty file, expected header {','.join(columns)}")
        header = [h.strip() for h in header]
        if tuple(header) != tuple(columns):
            raise ConfigurationError(f"{path}: header {','.join(header)} != {','.join(columns)}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != len(columns):
                raise ConfigurationError(f"{path}:{lineno}: expected {len(columns)} fields, got {len(rec)}")
            try:
                rows.append({c: float(v) for c, v in zip(columns, rec)})
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from None
    return rows


def read_score_matrix(path) -> np.ndarray:
    """Score CSV: header row of bin labels, one score vector per line."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ConfigurationError(f"{path}: missing header")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ConfigurationError(f"{path}:{lineno}: expected {len(header)} scores, got {len(rec)}")
            try:
                rows.append([float(v) for v in rec])
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from None
    return np.array(rows, dtype=np.float64).reshape(len(rows), len(header))


def write_score_matrix(path, scores: np.ndarray, prefix: str) -> None:
    scores = np.atleast_2d(scores)
    columns = [f"{prefix}{n}" for n in range(scores.shape[1])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in scores:
            writer.writerow([repr(float(v)) for v in row])
