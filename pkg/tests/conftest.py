from __future__ import annotations

import numpy as np
import pytest

from slicetrack.core import Mask3D, SliceMask2D


def mask2d(rows: list[str]) -> SliceMask2D:
    """Build a slice mask from strings of '.' and '#'."""
    return SliceMask2D(np.array([[c == "#" for c in row] for row in rows], dtype=bool))


def random_slice_masks(count: int, dims: tuple[int, int], seed: int, density: float = 0.5):
    rng = np.random.default_rng(seed)
    return [SliceMask2D(rng.random(dims) < density) for _ in range(count)]


def blob_mask3d(rng: np.random.Generator, dims=(10, 12, 12), spacing=(1.0, 1.0, 1.0)) -> Mask3D:
    """Union of a few random ellipsoids, occasionally a box: tumor-like blobs."""
    from slicetrack.harness import ellipsoid_mask

    bits = np.zeros(dims, bool)
    for _ in range(int(rng.integers(1, 4))):
        center = tuple(float(rng.uniform(2, n - 3)) for n in dims)
        radii = tuple(float(rng.uniform(1.0, 3.5)) for _ in range(3))
        bits |= ellipsoid_mask(dims, center, radii)
    if rng.random() < 0.3:
        z0, y0, x0 = (int(rng.integers(0, n - 3)) for n in dims)
        bits[z0 : z0 + 2, y0 : y0 + 3, x0 : x0 + 2] = True
    return Mask3D(bits, spacing)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
