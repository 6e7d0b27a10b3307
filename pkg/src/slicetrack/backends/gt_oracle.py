"""Ground-truth oracle backend: returns the GT slice, progressively corrupted.

The corruption is a pure function of (z, step_index, seed), never of earlier
predictions, so strategy comparisons are exactly analyzable: longer chains
accumulate more erosion. drift >= 0 erodes by floor(step_index * drift);
negative drift dilates by floor(step_index * |drift|). Pixel flips use a
counter-based PRNG keyed by (seed, z, y, x), so the noise field is
independent of pixel iteration order and of which slices were requested.
"""

from __future__ import annotations

import math
import time

import numpy as np

from ..core import Mask3D, SliceMask2D, dilate, erode
from .base import (
    BackendError,
    BackendInfo,
    ParamSpec,
    SessionConfig,
    StepRequest,
    StepResult,
    VolumeResolver,
    check_slice_index,
    guidance_step_index,
    validate_params,
)

_U64 = np.uint64


def _splitmix64(x: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    x = x + _U64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> _U64(27))) * _U64(0x94D049BB133111EB)
    return x ^ (x >> _U64(31))


def flip_field(dims: tuple[int, int], z: int, seed: int, flip_prob: float) -> np.ndarray:
    """Boolean grid marking pixels to flip, reproducible per (seed, z, y, x)."""
    h, w = dims
    yy, xx = np.meshgrid(
        np.arange(h, dtype=np.uint64), np.arange(w, dtype=np.uint64), indexing="ij"
    )
    with np.errstate(over="ignore"):
        key = _splitmix64(_U64(seed & 0xFFFFFFFFFFFFFFFF))
        key = _splitmix64(key ^ _U64(z))
        cell = _splitmix64((yy << _U64(32)) ^ xx ^ key)
    u = (cell >> _U64(11)).astype(np.float64) / float(1 << 53)
    return u < flip_prob


def corrupt_slice(
    gt_slice: SliceMask2D, z: int, step_index: int, drift: float, flip_prob: float, seed: int
) -> SliceMask2D:
    radius = math.floor(step_index * abs(drift))
    if drift >= 0:
        out = erode(gt_slice, radius)
    else:
        out = dilate(gt_slice, radius)
    if flip_prob > 0:
        out = SliceMask2D(out.bits ^ flip_field(out.dims, z, seed, flip_prob))
    return out


class GtOracleSession:
    def __init__(self, volume_dims: tuple[int, int, int], gt: Mask3D, params: dict):
        if gt.dims != volume_dims:
            raise BackendError(f"ground truth dims {gt.dims} do not match volume {volume_dims}")
        self._dims = volume_dims
        self._gt = gt
        self._drift = params["drift"]
        self._flip_prob = params["flip_prob"]
        self._seed = params["seed"]
        self._closed = False

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._dims

    def step(self, req: StepRequest) -> StepResult:
        if self._closed:
            raise BackendError("closed")
        check_slice_index(req.z, self._dims)
        start = time.perf_counter()
        mask = corrupt_slice(
            self._gt.slice_at(req.z),
            req.z,
            guidance_step_index(req.guidance),
            self._drift,
            self._flip_prob,
            self._seed,
        )
        return StepResult(req.z, mask, (time.perf_counter() - start) * 1000.0)

    def close(self) -> None:
        if self._closed:
            raise BackendError("closed")
        self._closed = True


def gt_oracle_backend() -> BackendInfo:
    schema = {
        "gt_ref": ParamSpec(type="string", required=True),
        "drift": ParamSpec(type="number", default=0.0, minimum=-16.0, maximum=16.0),
        "flip_prob": ParamSpec(type="number", default=0.0, minimum=0.0, maximum=1.0),
        "seed": ParamSpec(type="integer", default=0),
    }

    def factory(cfg: SessionConfig, resolver: VolumeResolver) -> GtOracleSession:
        params = validate_params(schema, cfg.params)
        volume = resolver.volume(cfg.volume_ref)
        gt = resolver.mask(params["gt_ref"])
        return GtOracleSession(volume.dims, gt, params)

    return BackendInfo(backend_id="gt-oracle", params_schema=schema, factory=factory)
