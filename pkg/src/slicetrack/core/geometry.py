"""Mask geometry: tight boxes and tumor slice extents."""

from __future__ import annotations

import numpy as np

from .types import BoundingBox2D, Mask3D, SliceMask2D, TumorExtent


def bbox_from_slice_mask(m: SliceMask2D) -> BoundingBox2D | None:
    """Tight half-open box over all foreground pixels; None for an empty mask."""
    ys, xs = np.nonzero(m.bits)
    if ys.size == 0:
        return None
    return BoundingBox2D(
        x_min=int(xs.min()),
        y_min=int(ys.min()),
        x_max=int(xs.max()) + 1,
        y_max=int(ys.max()) + 1,
    )


def slice_areas(g: Mask3D) -> np.ndarray:
    """Foreground pixel count per slice, indexed by z."""
    return g.bits.sum(axis=(1, 2))


def tumor_extent(g: Mask3D, center_rule: str = "midpoint") -> TumorExtent:
    """Slice range with foreground plus a center slice.

    midpoint: z_center = floor((z_first + z_last) / 2).
    max_area: z_center = slice with the largest foreground area, ties going
    to the smaller index.
    """
    areas = slice_areas(g)
    nonzero = np.flatnonzero(areas)
    if nonzero.size == 0:
        raise ValueError("no foreground")
    z_first, z_last = int(nonzero[0]), int(nonzero[-1])
    if center_rule == "midpoint":
        z_center = (z_first + z_last) // 2
    elif center_rule == "max_area":
        z_center = int(np.argmax(areas))  # argmax returns the smallest index on ties
    else:
        raise ValueError(f"unknown center rule {center_rule!r}")
    return TumorExtent(z_first=z_first, z_last=z_last, z_center=z_center)
