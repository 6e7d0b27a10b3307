"""Intensity windowing for display: map a slice to 8-bit grayscale.

Percentiles use the nearest-rank method and the final byte mapping rounds
half up, so display bytes are bit-reproducible.
"""

from __future__ import annotations

import numpy as np


def nearest_rank_percentile(sorted_values: np.ndarray, p: float) -> float:
    """p-th percentile of pre-sorted values, nearest-rank convention."""
    n = sorted_values.size
    if n == 0:
        raise ValueError("empty input")
    if p <= 0:
        return float(sorted_values[0])
    rank = int(np.ceil(p / 100.0 * n))
    return float(sorted_values[min(rank, n) - 1])


def window_to_u8(pixels: np.ndarray, p_lo: float = 1.0, p_hi: float = 99.0) -> np.ndarray:
    """Clamp to the [p_lo, p_hi] percentile window, map linearly to 0..255.

    A degenerate window (hi == lo) maps everything to 0.
    """
    if not 0 <= p_lo < p_hi <= 100:
        raise ValueError(f"bad percentile window ({p_lo}, {p_hi})")
    arr = np.asarray(pixels, dtype=np.float64)
    flat = np.sort(arr.ravel())
    lo = nearest_rank_percentile(flat, p_lo)
    hi = nearest_rank_percentile(flat, p_hi)
    if hi == lo:
        return np.zeros(arr.shape, dtype=np.uint8)
    scaled = (np.clip(arr, lo, hi) - lo) / (hi - lo) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)
