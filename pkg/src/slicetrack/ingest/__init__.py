from .manifest import DatasetManifest, ManifestError, PatientRecord, load_manifest
from .nifti import (
    NiftiFormatError,
    NiftiMeta,
    load_nifti,
    load_nifti_bytes,
    read_meta,
    save_nifti,
)
from .windowing import nearest_rank_percentile, window_to_u8

__all__ = [
    "DatasetManifest",
    "ManifestError",
    "NiftiFormatError",
    "NiftiMeta",
    "PatientRecord",
    "load_manifest",
    "load_nifti",
    "load_nifti_bytes",
    "nearest_rank_percentile",
    "read_meta",
    "save_nifti",
    "window_to_u8",
]
