"""On-disk volume store for the service.

Volumes are content-addressed: the id is a digest of the uploaded bytes, so
a stored volume can never change under a client. Ground-truth masks attach
to a volume id. Loaded objects are cached in memory behind a lock.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path

from ..core import IntensityVolume, Mask3D
from ..ingest import load_nifti_bytes


class StoreError(ValueError):
    pass


class VolumeStore:
    def __init__(self, data_dir: str | Path):
        self._dir = Path(data_dir)
        (self._dir / "volumes").mkdir(parents=True, exist_ok=True)
        (self._dir / "ground-truth").mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._volumes: dict[str, IntensityVolume] = {}
        self._masks: dict[str, Mask3D] = {}
        self._load_existing()

    def _load_existing(self) -> None:
        for path in sorted((self._dir / "volumes").glob("*.nii")):
            vid = path.stem
            try:
                self._volumes[vid] = load_nifti_bytes(path.read_bytes())
            except ValueError:
                continue
            gt_path = self._dir / "ground-truth" / f"{vid}.nii"
            if gt_path.exists():
                try:
                    self._masks[vid] = load_nifti_bytes(gt_path.read_bytes(), mask=True)
                except ValueError:
                    pass

    def volume_path(self, volume_id: str) -> Path:
        return self._dir / "volumes" / f"{volume_id}.nii"

    def gt_path(self, volume_id: str) -> Path:
        return self._dir / "ground-truth" / f"{volume_id}.nii"

    def add_volume(self, raw: bytes) -> tuple[str, IntensityVolume]:
        """Parse, persist, and register an uploaded NIfTI payload."""
        volume = load_nifti_bytes(raw)
        assert isinstance(volume, IntensityVolume)
        volume_id = hashlib.sha256(raw).hexdigest()[:16]
        with self._lock:
            if volume_id not in self._volumes:
                self.volume_path(volume_id).write_bytes(raw)
                self._volumes[volume_id] = volume
        return volume_id, volume

    def set_ground_truth(self, volume_id: str, raw: bytes) -> Mask3D:
        mask = load_nifti_bytes(raw, mask=True)
        assert isinstance(mask, Mask3D)
        with self._lock:
            volume = self._volumes.get(volume_id)
            if volume is None:
                raise StoreError(f"unknown volume {volume_id!r}")
            if mask.dims != volume.dims:
                raise StoreError(
                    f"ground truth dims {mask.dims} do not match volume {volume.dims}"
                )
            self.gt_path(volume_id).write_bytes(raw)
            self._masks[volume_id] = mask
        return mask

    def volume(self, volume_id: str) -> IntensityVolume:
        with self._lock:
            volume = self._volumes.get(volume_id)
        if volume is None:
            raise StoreError(f"unknown volume {volume_id!r}")
        return volume

    def ground_truth(self, volume_id: str) -> Mask3D | None:
        with self._lock:
            return self._masks.get(volume_id)

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._volumes)

    def has_volume(self, volume_id: str) -> bool:
        with self._lock:
            return volume_id in self._volumes
