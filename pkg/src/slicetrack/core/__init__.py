from .geometry import bbox_from_slice_mask, slice_areas, tumor_extent
from .morphology import connected_components, dilate, erode, label_slice_components
from .rle import RleCounts, rle_decode, rle_encode, rle_from_json, rle_to_json
from .types import (
    BoundingBox2D,
    BoxPrompt,
    IntensityVolume,
    Mask3D,
    MaskPrompt,
    Prompt,
    SliceMask2D,
    Spacing,
    TumorExtent,
)

__all__ = [
    "BoundingBox2D",
    "BoxPrompt",
    "IntensityVolume",
    "Mask3D",
    "MaskPrompt",
    "Prompt",
    "RleCounts",
    "SliceMask2D",
    "Spacing",
    "TumorExtent",
    "bbox_from_slice_mask",
    "connected_components",
    "dilate",
    "erode",
    "label_slice_components",
    "rle_decode",
    "rle_encode",
    "rle_from_json",
    "rle_to_json",
    "slice_areas",
    "tumor_extent",
]
