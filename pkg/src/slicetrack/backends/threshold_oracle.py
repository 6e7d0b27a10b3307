"""Intensity-threshold oracle backend: a crude tracker over real pixel data.

The region of interest follows the guidance: the prompt region on the seed
step, then the previous mask's tight box dilated by roi_dilate. Within the
ROI, pixels at or above tau are foreground, reduced to one 8-connected
component: the one under the ROI center, or the largest when the center
pixel is background.
"""

from __future__ import annotations

import time

import numpy as np

from ..core import (
    BoundingBox2D,
    BoxPrompt,
    IntensityVolume,
    MaskPrompt,
    SliceMask2D,
    bbox_from_slice_mask,
    label_slice_components,
)
from .base import (
    BackendError,
    BackendInfo,
    ParamSpec,
    PreviousMask,
    SessionConfig,
    StepRequest,
    StepResult,
    VolumeResolver,
    check_slice_index,
    validate_params,
)


def _clip_box(box: BoundingBox2D, dims: tuple[int, int], pad: int = 0) -> BoundingBox2D:
    h, w = dims
    return BoundingBox2D(
        x_min=max(0, box.x_min - pad),
        y_min=max(0, box.y_min - pad),
        x_max=min(w, box.x_max + pad),
        y_max=min(h, box.y_max + pad),
    )


def _box_center(box: BoundingBox2D) -> tuple[int, int]:
    return (box.y_min + box.y_max) // 2, (box.x_min + box.x_max) // 2


class ThresholdOracleSession:
    def __init__(self, volume: IntensityVolume, params: dict):
        self._volume = volume
        self._tau = params["tau"]
        self._roi_dilate = params["roi_dilate"]
        self._closed = False

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._volume.dims

    def _roi(self, guidance) -> tuple[np.ndarray, tuple[int, int]] | None:
        """ROI pixel set plus the center used for component selection."""
        slice_dims = self.dims[1:]
        if isinstance(guidance, BoxPrompt):
            box = _clip_box(guidance.box, slice_dims)
            roi = np.zeros(slice_dims, dtype=bool)
            roi[box.y_min : box.y_max, box.x_min : box.x_max] = True
            return roi, _box_center(box)
        if isinstance(guidance, MaskPrompt):
            # The prompt mask itself is the ROI: it says exactly where to look.
            if guidance.mask.dims != slice_dims:
                raise BackendError("prompt mask dims do not match volume slices")
            box = bbox_from_slice_mask(guidance.mask)
            return guidance.mask.bits, _box_center(box)
        assert isinstance(guidance, PreviousMask)
        if guidance.mask.dims != slice_dims:
            raise BackendError("previous mask dims do not match volume slices")
        tight = bbox_from_slice_mask(guidance.mask)
        if tight is None:
            return None
        box = _clip_box(tight, slice_dims, pad=self._roi_dilate)
        roi = np.zeros(slice_dims, dtype=bool)
        roi[box.y_min : box.y_max, box.x_min : box.x_max] = True
        return roi, _box_center(box)

    def step(self, req: StepRequest) -> StepResult:
        if self._closed:
            raise BackendError("closed")
        check_slice_index(req.z, self._volume.dims)
        start = time.perf_counter()
        roi = self._roi(req.guidance)
        if roi is None:
            mask = SliceMask2D.zeros(self.dims[1:])
        else:
            roi_bits, center = roi
            candidate = roi_bits & (self._volume.slice_at(req.z) >= self._tau)
            mask = SliceMask2D(self._select_component(candidate, center))
        return StepResult(req.z, mask, (time.perf_counter() - start) * 1000.0)

    @staticmethod
    def _select_component(candidate: np.ndarray, center: tuple[int, int]) -> np.ndarray:
        count, labels = label_slice_components(candidate)
        if count == 0:
            return candidate
        target = labels[center]
        if target == 0:
            sizes = np.bincount(labels.ravel())[1:]
            target = int(np.argmax(sizes)) + 1  # ties go to the smallest label
        return labels == target

    def close(self) -> None:
        if self._closed:
            raise BackendError("closed")
        self._closed = True


def threshold_oracle_backend() -> BackendInfo:
    schema = {
        "tau": ParamSpec(type="number", required=True),
        "roi_dilate": ParamSpec(type="integer", default=2, minimum=0, maximum=64),
    }

    def factory(cfg: SessionConfig, resolver: VolumeResolver) -> ThresholdOracleSession:
        params = validate_params(schema, cfg.params)
        return ThresholdOracleSession(resolver.volume(cfg.volume_ref), params)

    return BackendInfo(backend_id="threshold-oracle", params_schema=schema, factory=factory)
