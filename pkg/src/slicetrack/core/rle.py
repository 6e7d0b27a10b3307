"""Run-length codec for slice masks.

Counts are alternating run lengths over the row-major bit string, starting
with the leading run of background (possibly 0), COCO-style. The JSON wire
form is {"dims": [h, w], "counts": [...]}.
"""

from __future__ import annotations

import numpy as np

from .types import SliceMask2D

RleCounts = list[int]


def rle_encode(m: SliceMask2D) -> RleCounts:
    """Encode a slice mask; decode(encode(m)) recovers m exactly."""
    flat = m.bits.ravel()
    n = flat.size
    if n == 0:
        return []
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    runs = np.diff(np.concatenate(([0], boundaries, [n])))
    counts = runs.tolist()
    if flat[0]:
        counts.insert(0, 0)
    return counts


def rle_decode(counts: RleCounts, dims: tuple[int, int]) -> SliceMask2D:
    """Decode counts into a mask of the given (h, w) dims."""
    h, w = dims
    total = sum(counts)
    if total != h * w:
        raise ValueError(f"length mismatch: counts sum {total}, expected {h * w}")
    if any(c < 0 for c in counts):
        raise ValueError("negative run length")
    flat = np.zeros(h * w, dtype=bool)
    pos = 0
    value = False
    for c in counts:
        if value:
            flat[pos : pos + c] = True
        pos += c
        value = not value
    return SliceMask2D(flat.reshape(h, w))


def rle_to_json(m: SliceMask2D) -> dict:
    h, w = m.dims
    return {"dims": [h, w], "counts": rle_encode(m)}


def rle_from_json(obj: dict) -> SliceMask2D:
    try:
        h, w = obj["dims"]
        counts = obj["counts"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed RLE object: {exc}") from exc
    return rle_decode(list(counts), (int(h), int(w)))
