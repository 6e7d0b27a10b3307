"""RLE mask codec for the vp/1 wire format.

Counts alternate over the row-major bit string starting with the leading
background run (possibly 0). The JSON form is {"dims": [h, w], "counts": [...]}.
"""

from __future__ import annotations

import numpy as np


def encode(bits: np.ndarray) -> list[int]:
    flat = np.asarray(bits, dtype=bool).ravel()
    n = flat.size
    if n == 0:
        return []
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    runs = np.diff(np.concatenate(([0], boundaries, [n]))).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return runs


def decode(counts: list[int], dims: tuple[int, int]) -> np.ndarray:
    h, w = dims
    total = sum(counts)
    if total != h * w:
        raise ValueError(f"length mismatch: counts sum {total}, expected {h * w}")
    flat = np.zeros(h * w, dtype=bool)
    pos = 0
    value = False
    for count in counts:
        if value:
            flat[pos : pos + count] = True
        pos += count
        value = not value
    return flat.reshape(h, w)


def to_json(bits: np.ndarray) -> dict:
    h, w = bits.shape
    return {"dims": [h, w], "counts": encode(bits)}


def from_json(obj: dict) -> np.ndarray:
    h, w = obj["dims"]
    return decode(list(obj["counts"]), (int(h), int(w)))
