"""Binary field snapshots.

Layout: magic "MSMF", version u32, n u32, length f64, count u32, then
count fields of n*n complex values, row major, as little-endian f64
(re, im) pairs.
"""

from __future__ import annotations

import struct

import numpy as np

from .spectral import ComplexField, Grid

MAGIC = b"MSMF"
VERSION = 1
_HEADER = struct.Struct("<4sIIdI")


def write_snapshot(path, fields: list[ComplexField]) -> None:
    if not fields:
        raise ValueError("snapshot needs at least one field")
    grid = fields[0].grid
    for f in fields:
        if f.grid != grid:
            raise ValueError("snapshot fields must share one grid")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, grid.n, grid.length, len(fields)))
        for f in fields:
            fh.write(np.ascontiguousarray(f.samples, dtype="<c16").tobytes())


def read_snapshot(path) -> tuple[Grid, list[ComplexField]]:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError("truncated snapshot header")
        magic, version, n, length, count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValueError("not a field snapshot (bad magic)")
        if version != VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        grid = Grid(n, length)
        fields = []
        per_field = n * n * 16
        for _ in range(count):
            raw = fh.read(per_field)
            if len(raw) != per_field:
                raise ValueError("truncated snapshot payload")
            samples = np.frombuffer(raw, dtype="<c16").reshape(n, n)
            fields.append(ComplexField(grid, samples))
    return grid, fields
