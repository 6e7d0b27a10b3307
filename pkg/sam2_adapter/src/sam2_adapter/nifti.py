"""Minimal NIfTI-1 reader: rank-3 volumes, the common dtypes, gzip by content.

The adapter consumes volumes as files referenced in the open message; this
reader covers exactly the single-file layout the service emits (348-byte
header, data at offset 352, byte order detected via dim[0]).
"""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

DTYPES = {2: np.uint8, 4: np.int16, 16: np.float32, 512: np.uint16}


def load_volume(path: str | Path) -> np.ndarray:
    """Returns float32 voxels shaped (d, h, w) with scl scaling applied."""
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    if len(raw) < 352 or raw[344:348] != b"n+1\x00":
        raise ValueError("not NIfTI-1")
    bo = "<"
    rank = struct.unpack_from("<h", raw, 40)[0]
    if not 1 <= rank <= 7:
        bo = ">"
        rank = struct.unpack_from(">h", raw, 40)[0]
        if not 1 <= rank <= 7:
            raise ValueError("not NIfTI-1: bad dim[0]")
    if rank != 3:
        raise ValueError(f"unsupported rank {rank}")
    nx, ny, nz = struct.unpack_from(bo + "3h", raw, 42)
    code = struct.unpack_from(bo + "h", raw, 70)[0]
    if code not in DTYPES:
        raise ValueError(f"unsupported datatype {code}")
    slope, inter = struct.unpack_from(bo + "2f", raw, 112)
    dtype = np.dtype(DTYPES[code]).newbyteorder(bo)
    count = nx * ny * nz
    data = np.frombuffer(raw, dtype=dtype, count=count, offset=352)
    voxels = data.reshape(nz, ny, nx).astype(np.float32)
    if slope != 0.0 and (slope, inter) != (1.0, 0.0):
        voxels = voxels * np.float32(slope) + np.float32(inter)
    return voxels
