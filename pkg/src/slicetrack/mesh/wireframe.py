"""Bounding-box wireframes for 3D overlay rendering."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Spacing


@dataclass(frozen=True)
class Box3D:
    """Half-open voxel-index box."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int
    z_min: int
    z_max: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max and self.z_min < self.z_max):
            raise ValueError(f"degenerate box {self}")


@dataclass(frozen=True)
class Wireframe:
    vertices: tuple[tuple[float, float, float], ...]
    segments: tuple[tuple[int, int], ...]


def bbox_wireframe(box: Box3D, spacing: Spacing) -> Wireframe:
    """8 corners scaled by spacing plus the 12 box edges as index pairs."""
    sz, sy, sx = spacing
    xs = (box.x_min * sx, box.x_max * sx)
    ys = (box.y_min * sy, box.y_max * sy)
    zs = (box.z_min * sz, box.z_max * sz)
    # Corner i has bits (dx, dy, dz) = (i & 1, i >> 1 & 1, i >> 2 & 1).
    vertices = tuple(
        (xs[i & 1], ys[i >> 1 & 1], zs[i >> 2 & 1]) for i in range(8)
    )
    segments = tuple(
        (i, i | bit)
        for i in range(8)
        for bit in (1, 2, 4)
        if not i & bit
    )
    return Wireframe(vertices=vertices, segments=segments)
