"""Core voxel value types shared by every module.

Index order is (z, y, x) row-major everywhere: z selects the axial slice,
y the row, x the column. Spacing is physical voxel size in millimeters,
stored as (sz, sy, sx) to match the array axis order. All types are
immutable after construction (backing arrays are write-locked), so they can
be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Spacing = tuple[float, float, float]


def _frozen_array(data, dtype, ndim: int, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(data, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_spacing(spacing: Spacing) -> Spacing:
    spacing = tuple(float(s) for s in spacing)
    if len(spacing) != 3 or any(not np.isfinite(s) or s <= 0 for s in spacing):
        raise ValueError(f"spacing must be three positive finite reals, got {spacing}")
    return spacing


@dataclass(frozen=True)
class IntensityVolume:
    """A D x H x W scalar grid with physical voxel spacing; the scan itself."""

    voxels: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)

    def __post_init__(self):
        arr = _frozen_array(self.voxels, np.float32, 3, "voxels")
        if not np.isfinite(arr).all():
            raise ValueError("voxels must all be finite")
        object.__setattr__(self, "voxels", arr)
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.voxels.shape

    def slice_at(self, z: int) -> np.ndarray:
        return self.voxels[z]


@dataclass(frozen=True)
class Mask3D:
    """Binary foreground grid aligned with an IntensityVolume."""

    bits: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen_array(self.bits, bool, 3, "bits"))
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.bits.shape

    def foreground_count(self) -> int:
        return int(self.bits.sum())

    def slice_at(self, z: int) -> "SliceMask2D":
        return SliceMask2D(self.bits[z])


@dataclass(frozen=True)
class SliceMask2D:
    """Binary foreground grid for a single axial slice, row-major (y, x)."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen_array(self.bits, bool, 2, "bits"))

    @property
    def dims(self) -> tuple[int, int]:
        return self.bits.shape

    def foreground_count(self) -> int:
        return int(self.bits.sum())

    def is_empty(self) -> bool:
        return not self.bits.any()

    @classmethod
    def zeros(cls, dims: tuple[int, int]) -> "SliceMask2D":
        return cls(np.zeros(dims, dtype=bool))


@dataclass(frozen=True)
class BoundingBox2D:
    """Axis-aligned box on one slice; x/y bounds are half-open voxel indices.

    z is None for boxes derived from a bare slice mask and set once the box
    is placed on a volume slice (e.g. used as a prompt).
    """

    x_min: int
    y_min: int
    x_max: int
    y_max: int
    z: int | None = None

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate box {self}")
        if self.x_min < 0 or self.y_min < 0:
            raise ValueError(f"negative box bounds {self}")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    def at_slice(self, z: int) -> "BoundingBox2D":
        return BoundingBox2D(self.x_min, self.y_min, self.x_max, self.y_max, z=z)

    def validate_for(self, dims: tuple[int, int, int]) -> None:
        d, h, w = dims
        if self.z is None or not 0 <= self.z < d:
            raise ValueError(f"box slice index {self.z} outside [0, {d})")
        if self.x_max > w or self.y_max > h:
            raise ValueError(f"box {self} exceeds slice dims ({h}, {w})")


@dataclass(frozen=True)
class BoxPrompt:
    """Single bounding box on one slice; the minimal human input."""

    box: BoundingBox2D

    def __post_init__(self):
        if self.box.z is None:
            raise ValueError("box prompt requires a slice index")

    @property
    def z(self) -> int:
        return self.box.z

    @property
    def kind(self) -> str:
        return "box"


@dataclass(frozen=True)
class MaskPrompt:
    """Full segmentation mask on one slice; the richer prompt variant."""

    z: int
    mask: SliceMask2D

    def __post_init__(self):
        if self.mask.is_empty():
            raise ValueError("mask prompt must be non-empty")

    @property
    def kind(self) -> str:
        return "mask"


Prompt = BoxPrompt | MaskPrompt


@dataclass(frozen=True)
class TumorExtent:
    """Inclusive slice range containing ground-truth foreground."""

    z_first: int
    z_last: int
    z_center: int

    def __post_init__(self):
        if not self.z_first <= self.z_center <= self.z_last:
            raise ValueError(f"center slice outside extent: {self}")

    @property
    def span(self) -> int:
        return self.z_last - self.z_first

    def slices(self) -> range:
        return range(self.z_first, self.z_last + 1)
