"""Dataset manifests: which patients exist and where their files live."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    image_path: str
    gt_mask_path: str


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[PatientRecord, ...]

    def __len__(self) -> int:
        return len(self.entries)


REQUIRED_FIELDS = ("patient_id", "image_path", "gt_mask_path")


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse a JSON array of patient records, preserving order.

    Each record needs the three string fields patient_id, image_path,
    gt_mask_path; patient_id values must be unique.
    """
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, list):
        raise ManifestError(f"manifest must be a JSON array, got {type(data).__name__}")

    entries = []
    seen: set[str] = set()
    for i, rec in enumerate(data):
        if not isinstance(rec, dict):
            raise ManifestError(f"record {i} is not an object")
        for field in REQUIRED_FIELDS:
            value = rec.get(field)
            if not isinstance(value, str) or not value:
                raise ManifestError(f"record {i} missing or empty field {field!r}")
        pid = rec["patient_id"]
        if pid in seen:
            raise ManifestError(f"duplicate patient_id {pid!r}")
        seen.add(pid)
        entries.append(
            PatientRecord(
                patient_id=pid,
                image_path=rec["image_path"],
                gt_mask_path=rec["gt_mask_path"],
            )
        )
    return DatasetManifest(entries=tuple(entries))
