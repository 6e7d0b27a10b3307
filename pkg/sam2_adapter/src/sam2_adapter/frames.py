"""Volume slices to model frames.

Uses the same fixed windowing as the service's slice PNG endpoint
(percentiles 1/99, nearest rank, round half up) so the model sees exactly
what the annotator sees, replicated to three channels.
"""

from __future__ import annotations

import numpy as np


def window_to_u8(pixels: np.ndarray, p_lo: float = 1.0, p_hi: float = 99.0) -> np.ndarray:
    arr = np.asarray(pixels, dtype=np.float64)
    flat = np.sort(arr.ravel())
    n = flat.size

    def rank(p: float) -> float:
        if p <= 0:
            return float(flat[0])
        return float(flat[min(int(np.ceil(p / 100.0 * n)), n) - 1])

    lo, hi = rank(p_lo), rank(p_hi)
    if hi == lo:
        return np.zeros(arr.shape, dtype=np.uint8)
    scaled = (np.clip(arr, lo, hi) - lo) / (hi - lo) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)


def volume_to_frames(voxels: np.ndarray) -> np.ndarray:
    """(d, h, w) scalars -> (d, h, w, 3) uint8; windowed per slice."""
    frames = np.stack([window_to_u8(voxels[z]) for z in range(voxels.shape[0])])
    return np.repeat(frames[..., None], 3, axis=-1)
