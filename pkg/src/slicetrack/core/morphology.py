"""Binary morphology and connected-component labeling.

Erode/dilate use a square (Chebyshev) structuring element of radius r, so
results are exact and integer-only. Pixels beyond the slice border count as
background for erosion.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .types import Mask3D, SliceMask2D


def _square(r: int) -> np.ndarray:
    return np.ones((2 * r + 1, 2 * r + 1), dtype=bool)


def dilate(m: SliceMask2D, r: int) -> SliceMask2D:
    """Set every pixel within Chebyshev distance r of a foreground pixel."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    if r == 0:
        return m
    return SliceMask2D(ndimage.binary_dilation(m.bits, structure=_square(r)))


def erode(m: SliceMask2D, r: int) -> SliceMask2D:
    """Keep pixels whose full Chebyshev-r neighborhood is foreground."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    if r == 0:
        return m
    return SliceMask2D(ndimage.binary_erosion(m.bits, structure=_square(r), border_value=0))


def connected_components(m: Mask3D, connectivity: int = 26) -> tuple[int, np.ndarray]:
    """Label maximal connected foreground sets; background stays 0.

    connectivity 6 joins voxels sharing a face, 26 joins voxels sharing a
    face, edge, or corner.
    """
    if connectivity == 6:
        structure = ndimage.generate_binary_structure(3, 1)
    elif connectivity == 26:
        structure = ndimage.generate_binary_structure(3, 3)
    else:
        raise ValueError(f"connectivity must be 6 or 26, got {connectivity}")
    labels, count = ndimage.label(m.bits, structure=structure)
    return int(count), labels


def label_slice_components(bits: np.ndarray) -> tuple[int, np.ndarray]:
    """8-connectivity labeling of a 2D boolean grid."""
    structure = ndimage.generate_binary_structure(2, 2)
    labels, count = ndimage.label(bits, structure=structure)
    return int(count), labels
