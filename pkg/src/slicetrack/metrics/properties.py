"""Tumor properties used as failure correlates."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Mask3D, connected_components, slice_areas


@dataclass(frozen=True)
class TumorProperties:
    n_tumor_slices: int
    tumor_volume_voxels: int
    initial_area_voxels: int
    lesion_count: int


def tumor_properties(g: Mask3D, prompt_z: int) -> TumorProperties:
    """Slice count, voxel volume, prompt-slice area, and lesion count of g.

    Lesions are 26-connectivity components; an empty mask yields all zeros.
    """
    if not 0 <= prompt_z < g.dims[0]:
        raise ValueError(f"prompt slice {prompt_z} outside [0, {g.dims[0]})")
    areas = slice_areas(g)
    lesions, _ = connected_components(g, connectivity=26)
    return TumorProperties(
        n_tumor_slices=int((areas > 0).sum()),
        tumor_volume_voxels=int(areas.sum()),
        initial_area_voxels=int(areas[prompt_z]),
        lesion_count=lesions,
    )
