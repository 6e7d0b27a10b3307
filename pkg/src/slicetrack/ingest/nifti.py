"""Minimal NIfTI-1 reader/writer for rank-3 volumes and binary masks.

Single-file .nii layout: 348-byte header, 4-byte extension indicator,
voxel data at byte 352. Data is stored x-fastest, so the on-disk order of a
(nz, ny, nx) C-contiguous array matches our (z, y, x) convention directly.
Gzip containers are detected by content, not file name. Byte order is
detected by checking whether dim[0] parses to a value in [1, 7].
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core import IntensityVolume, Mask3D

HEADER_SIZE = 348
VOX_OFFSET = 352
MAGIC = b"n+1\x00"

# NIfTI datatype code -> numpy dtype (supported subset)
DTYPES = {
    2: np.dtype(np.uint8),
    4: np.dtype(np.int16),
    16: np.dtype(np.float32),
    512: np.dtype(np.uint16),
}
DTYPE_CODES = {v: k for k, v in DTYPES.items()}


class NiftiFormatError(ValueError):
    """File is not a NIfTI-1 volume this reader supports."""


@dataclass(frozen=True)
class NiftiMeta:
    """Header fields relevant to loading: shape, datatype, scaling, order."""

    dims: tuple[int, int, int]  # (d, h, w) == (nz, ny, nx)
    datatype: int
    spacing: tuple[float, float, float]  # (sz, sy, sx)
    scl_slope: float
    scl_inter: float
    big_endian: bool


def _read_bytes(path: str | Path) -> bytes:
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def parse_header(raw: bytes) -> NiftiMeta:
    if len(raw) < VOX_OFFSET:
        raise NiftiFormatError("not NIfTI-1: file shorter than header")
    if raw[344:348] != MAGIC:
        raise NiftiFormatError("not NIfTI-1: bad magic")

    big_endian = False
    rank = struct.unpack_from("<h", raw, 40)[0]
    if not 1 <= rank <= 7:
        rank = struct.unpack_from(">h", raw, 40)[0]
        if not 1 <= rank <= 7:
            raise NiftiFormatError("not NIfTI-1: dim[0] invalid in both byte orders")
        big_endian = True
    bo = ">" if big_endian else "<"

    if rank != 3:
        raise NiftiFormatError(f"unsupported rank {rank}")
    nx, ny, nz = struct.unpack_from(bo + "3h", raw, 42)
    if min(nx, ny, nz) <= 0:
        raise NiftiFormatError(f"non-positive dims ({nz}, {ny}, {nx})")
    datatype = struct.unpack_from(bo + "h", raw, 70)[0]
    if datatype not in DTYPES:
        raise NiftiFormatError(f"unsupported datatype {datatype}")
    sx, sy, sz = struct.unpack_from(bo + "3f", raw, 80)  # pixdim[1..3]
    if min(sx, sy, sz) <= 0:
        raise NiftiFormatError(f"non-positive pixdim ({sx}, {sy}, {sz})")
    scl_slope, scl_inter = struct.unpack_from(bo + "2f", raw, 112)
    return NiftiMeta(
        dims=(int(nz), int(ny), int(nx)),
        datatype=datatype,
        spacing=(float(sz), float(sy), float(sx)),
        scl_slope=float(scl_slope),
        scl_inter=float(scl_inter),
        big_endian=big_endian,
    )


def read_meta(path: str | Path) -> NiftiMeta:
    return parse_header(_read_bytes(path))


def _load_scaled(raw: bytes) -> tuple[np.ndarray, NiftiMeta]:
    meta = parse_header(raw)
    d, h, w = meta.dims
    dtype = DTYPES[meta.datatype]
    if meta.big_endian:
        dtype = dtype.newbyteorder(">")
    count = d * h * w
    if len(raw) < VOX_OFFSET + count * dtype.itemsize:
        raise NiftiFormatError("truncated voxel data")
    data = np.frombuffer(raw, dtype=dtype, count=count, offset=VOX_OFFSET)
    voxels = data.reshape(d, h, w).astype(np.float32)
    if meta.scl_slope != 0.0 and (meta.scl_slope, meta.scl_inter) != (1.0, 0.0):
        voxels = voxels * np.float32(meta.scl_slope) + np.float32(meta.scl_inter)
    return voxels, meta


def load_nifti_bytes(raw: bytes, mask: bool = False) -> IntensityVolume | Mask3D:
    """Parse NIfTI-1 bytes (gzip allowed) as a volume or a binary mask.

    Mask loading requires every scaled value to be exactly 0 or 1.
    """
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    voxels, meta = _load_scaled(raw)
    if not mask:
        return IntensityVolume(voxels, spacing=meta.spacing)
    binary = np.isin(voxels, (0.0, 1.0))
    if not binary.all():
        raise NiftiFormatError("non-binary mask")
    return Mask3D(voxels != 0.0, spacing=meta.spacing)


def load_nifti(path: str | Path, mask: bool = False) -> IntensityVolume | Mask3D:
    """Load a rank-3 NIfTI-1 file (.nii or .nii.gz) as a volume or mask."""
    return load_nifti_bytes(Path(path).read_bytes(), mask=mask)


def save_nifti(
    obj: IntensityVolume | Mask3D,
    path: str | Path,
    gzip_out: bool = False,
    dtype: str | np.dtype | None = None,
) -> None:
    """Write a volume or mask as single-file NIfTI-1 (little-endian).

    Masks are written as uint8. Volumes default to float32; pass a supported
    dtype to store integer data exactly.
    """
    if isinstance(obj, Mask3D):
        data = obj.bits.astype(np.uint8)
    else:
        data = obj.voxels.astype(np.dtype(dtype) if dtype is not None else np.float32)
    code = DTYPE_CODES.get(data.dtype)
    if code is None:
        raise NiftiFormatError(f"unsupported datatype {data.dtype}")

    d, h, w = obj.dims
    sz, sy, sx = obj.spacing
    header = bytearray(HEADER_SIZE)
    struct.pack_into("<i", header, 0, HEADER_SIZE)
    struct.pack_into("<8h", header, 40, 3, w, h, d, 1, 1, 1, 1)
    struct.pack_into("<h", header, 70, code)
    struct.pack_into("<h", header, 72, data.dtype.itemsize * 8)
    struct.pack_into("<8f", header, 76, 1.0, sx, sy, sz, 0.0, 0.0, 0.0, 0.0)
    struct.pack_into("<f", header, 108, float(VOX_OFFSET))
    struct.pack_into("<2f", header, 112, 1.0, 0.0)  # scl_slope, scl_inter
    struct.pack_into("<b", header, 123, 2)  # spatial units: millimeters
    header[344:348] = MAGIC

    payload = bytes(header) + b"\x00" * (VOX_OFFSET - HEADER_SIZE)
    payload += np.ascontiguousarray(data, dtype=data.dtype.newbyteorder("<")).tobytes()
    out = Path(path)
    if gzip_out:
        # mtime pinned so identical volumes produce identical bytes
        out.write_bytes(gzip.compress(payload, mtime=0))
    else:
        out.write_bytes(payload)
