from __future__ import annotations

import csv
import gzip
import io
import struct
from typing import IO, Optional

import numpy as np
from typing_extensions import Buffer

from hjbandit.errors import IllegalArgumentError

from .grid import GridSpec, ValueField

__all__ = [
    "encode_value_field",
    "decode_value_field",
    "write_value_csv",
    "format_number",
    "value_csv",
]

_MAGIC = b"HJBV"
_FORMAT_VERSION = 1
_FLAG_GZIP = 0x01
# magic, version, flags, K, time index, nx, nq, nt, x_min, x_max, q_max, dt
_HEADER = struct.Struct("<4sBBHIIIIdddd")
_VALUES_DTYPE = np.dtype("<f8")


def format_number(value: float) -> str:
    """Nine significant digits, the precision of every emitted table"""
    return f"{value:.9g}"


def encode_value_field(field: ValueField, compresslevel: Optional[int] = None) -> bytes:
    """Serialise a value slice: fixed header, then little-endian float64 values.

    With ``compresslevel`` the value block is gzip-compressed.
    """
    grid = field.grid
    flags = _FLAG_GZIP if compresslevel else 0
    header = _HEADER.pack(
        _MAGIC,
        _FORMAT_VERSION,
        flags,
        grid.K,
        field.time_index,
        grid.nx,
        grid.nq,
        grid.nt,
        grid.x_min,
        grid.x_max,
        grid.q_max,
        grid.dt,
    )
    payload = field.values.astype(_VALUES_DTYPE, copy=False).tobytes()
    if compresslevel:
        payload = gzip.compress(payload, compresslevel=compresslevel)
    return header + payload


def decode_value_field(data: Buffer) -> ValueField:
    view = memoryview(data)
    if len(view) < _HEADER.size:
        raise IllegalArgumentError("value field buffer is shorter than its header")
    (
        magic,
        version,
        flags,
        K,  # noqa: N806
        time_index,
        nx,
        nq,
        nt,
        x_min,
        x_max,
        q_max,
        dt,
    ) = _HEADER.unpack_from(view)
    if magic != _MAGIC:
        raise IllegalArgumentError(f"not a value field (magic {magic!r})")
    if version != _FORMAT_VERSION:
        raise IllegalArgumentError(f"unsupported value field version {version}")
    grid = GridSpec(x_min, x_max, nx, q_max, nq, nt, dt, K)
    payload = bytes(view[_HEADER.size :])
    if flags & _FLAG_GZIP:
        payload = gzip.decompress(payload)
    values = np.frombuffer(payload, dtype=_VALUES_DTYPE)
    return ValueField(grid, time_index, values.astype(np.float64))


def write_value_csv(field: ValueField, out: IO[str], *, comment: str = "") -> None:
    """CSV with one row per node: ``x, q, value`` (``x1, q1, ..`` for K arms)"""
    grid = field.grid
    writer = csv.writer(out, lineterminator="\n")
    if comment:
        out.write(f"# {comment}\n")
    if grid.K == 1:
        header = ["x", "q", "value"]
    else:
        header = [f"{c}{k + 1}" for k in range(grid.K) for c in ("x", "q")] + ["value"]
    writer.writerow(header)
    xs, qs = grid.flat_mesh()
    for row in range(grid.size):
        cells = []
        for arm in range(grid.K):
            cells.append(format_number(xs[row, arm]))
            cells.append(format_number(qs[row, arm]))
        cells.append(format_number(field.values[row]))
        writer.writerow(cells)


def value_csv(field: ValueField, comment: str = "") -> str:
    buf = io.StringIO()
    write_value_csv(field, buf, comment=comment)
    return buf.getvalue()
