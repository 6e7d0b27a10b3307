"""SAM2 video-tracking wrapper.

Imports torch/sam2 lazily so the protocol layer stays testable without the
model. The tracker keeps SAM2's own cross-frame memory: the seed prompt
(box or mask) is registered once, predictions for other slices come from
propagating the video state toward them; previous-mask guidance from the
wire is accepted but not re-fed to the model.

Checkpoint and config come from the open params (checkpoint, model_cfg) or
the SAM2_CHECKPOINT / SAM2_MODEL_CFG environment variables.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np


class ModelUnavailable(RuntimeError):
    pass


def resolve_checkpoint(params: dict) -> tuple[str, str]:
    checkpoint = params.get("checkpoint") or os.environ.get("SAM2_CHECKPOINT", "")
    model_cfg = params.get("model_cfg") or os.environ.get(
        "SAM2_MODEL_CFG", "configs/sam2.1/sam2.1_hiera_t.yaml"
    )
    if not checkpoint or not Path(checkpoint).exists():
        raise ModelUnavailable(f"SAM2 checkpoint not found: {checkpoint!r}")
    return checkpoint, model_cfg


class Sam2Tracker:
    """One tracked object over one frame sequence."""

    OBJ_ID = 1

    def __init__(self, params: dict):
        checkpoint, model_cfg = resolve_checkpoint(params)
        try:
            import torch
            from sam2.build_sam import build_sam2_video_predictor
        except ImportError as exc:
            raise ModelUnavailable(f"sam2 package not importable: {exc}") from exc
        device = params.get("device") or ("cuda" if torch.cuda.is_available() else "cpu")
        self._predictor = build_sam2_video_predictor(model_cfg, checkpoint, device=device)
        self._state = None
        self._frames_dir: tempfile.TemporaryDirectory | None = None
        self._dims: tuple[int, int, int] | None = None
        self._cache: dict[int, np.ndarray] = {}
        self._seed_z: int | None = None

    def open(self, frames: np.ndarray) -> None:
        """frames: (d, h, w, 3) uint8. SAM2's video loader wants JPEG frames."""
        from PIL import Image

        self._dims = frames.shape[:3]
        self._frames_dir = tempfile.TemporaryDirectory(prefix="sam2-frames-")
        for z in range(frames.shape[0]):
            Image.fromarray(frames[z]).save(Path(self._frames_dir.name) / f"{z:05d}.jpg")
        self._state = self._predictor.init_state(video_path=self._frames_dir.name)

    def seed_box(self, z: int, box_xyxy: tuple[int, int, int, int]) -> np.ndarray:
        self._seed_z = z
        _, _, logits = self._predictor.add_new_points_or_box(
            self._state, frame_idx=z, obj_id=self.OBJ_ID,
            box=np.asarray(box_xyxy, dtype=np.float32),
        )
        mask = self._logits_to_mask(logits)
        self._cache[z] = mask
        return mask

    def seed_mask(self, z: int, mask: np.ndarray) -> np.ndarray:
        self._seed_z = z
        _, _, logits = self._predictor.add_new_mask(
            self._state, frame_idx=z, obj_id=self.OBJ_ID, mask=mask.astype(bool)
        )
        out = self._logits_to_mask(logits)
        self._cache[z] = out
        return out

    def predict(self, z: int) -> np.ndarray:
        """Mask for slice z, propagating the video state toward it on demand."""
        if z in self._cache:
            return self._cache[z]
        if self._seed_z is None:
            raise RuntimeError("predict before seeding a prompt")
        reverse = z < self._seed_z
        for frame_idx, _obj_ids, logits in self._predictor.propagate_in_video(
            self._state, start_frame_idx=self._seed_z, reverse=reverse
        ):
            self._cache[frame_idx] = self._logits_to_mask(logits)
            if frame_idx == z:
                break
        if z not in self._cache:
            raise RuntimeError(f"propagation did not reach slice {z}")
        return self._cache[z]

    def _logits_to_mask(self, logits) -> np.ndarray:
        mask = (logits[0] > 0.0).squeeze()
        arr = mask.cpu().numpy() if hasattr(mask, "cpu") else np.asarray(mask)
        return arr.astype(bool).reshape(self._dims[1:])

    def close(self) -> None:
        self._state = None
        self._predictor = None
        if self._frames_dir is not None:
            self._frames_dir.cleanup()
            self._frames_dir = None
