from .evaluate import EvalOutcome, PatientError, derive_prompt, evaluate_manifest, evaluate_patient
from .phantoms import (
    ellipsoid_mask,
    ellipsoid_phantom,
    horseshoe_distractor_phantom,
    uniform_slab_phantom,
    write_phantom_dataset,
)
from .report import build_report, write_records_csv, write_report_json

__all__ = [
    "EvalOutcome",
    "PatientError",
    "build_report",
    "derive_prompt",
    "ellipsoid_mask",
    "ellipsoid_phantom",
    "evaluate_manifest",
    "evaluate_patient",
    "horseshoe_distractor_phantom",
    "uniform_slab_phantom",
    "write_phantom_dataset",
    "write_records_csv",
    "write_report_json",
]
