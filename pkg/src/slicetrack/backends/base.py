"""Uniform session interface over promptable slice segmenters.

A backend opens a session on one volume and answers per-slice step requests.
The guidance for the first step of a chain is the user prompt; every later
step carries the previous slice's predicted mask and its step index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

from ..core import BoxPrompt, IntensityVolume, Mask3D, MaskPrompt, Prompt, SliceMask2D
from ..ingest import load_nifti


class BackendError(RuntimeError):
    pass


@dataclass(frozen=True)
class PreviousMask:
    """Chain guidance: the predicted mask from the previous slice."""

    mask: SliceMask2D
    step_index: int  # steps since the chain's seed, >= 1

    def __post_init__(self):
        if self.step_index < 1:
            raise ValueError("step_index must be >= 1 for previous-mask guidance")


Guidance = Prompt | PreviousMask


def guidance_step_index(guidance: Guidance) -> int:
    """Seed prompts are step 0; chain guidance carries its own index."""
    return guidance.step_index if isinstance(guidance, PreviousMask) else 0


@dataclass(frozen=True)
class StepRequest:
    z: int
    guidance: Guidance


@dataclass(frozen=True)
class StepResult:
    z: int
    mask: SliceMask2D
    latency_ms: float


@dataclass(frozen=True)
class SessionConfig:
    backend_id: str
    volume_ref: str
    params: dict = field(default_factory=dict)


class Session(Protocol):
    @property
    def dims(self) -> tuple[int, int, int]: ...

    def step(self, req: StepRequest) -> StepResult: ...

    def close(self) -> None: ...


class VolumeResolver:
    """Resolves volume refs: registered ids first, then filesystem paths."""

    def __init__(self):
        self._volumes: dict[str, IntensityVolume] = {}
        self._masks: dict[str, Mask3D] = {}
        self._paths: dict[str, str] = {}

    def register_volume(self, ref: str, volume: IntensityVolume, path: str | None = None) -> None:
        self._volumes[ref] = volume
        if path is not None:
            self._paths[ref] = path

    def register_mask(self, ref: str, mask: Mask3D, path: str | None = None) -> None:
        self._masks[ref] = mask
        if path is not None:
            self._paths[f"mask:{ref}"] = path

    def volume(self, ref: str) -> IntensityVolume:
        if ref in self._volumes:
            return self._volumes[ref]
        if Path(ref).is_file():
            vol = load_nifti(ref)
            assert isinstance(vol, IntensityVolume)
            return vol
        raise BackendError(f"unreadable volume {ref!r}")

    def mask(self, ref: str) -> Mask3D:
        if ref in self._masks:
            return self._masks[ref]
        if Path(ref).is_file():
            m = load_nifti(ref, mask=True)
            assert isinstance(m, Mask3D)
            return m
        raise BackendError(f"unreadable mask {ref!r}")

    def path_for(self, ref: str) -> str:
        if ref in self._paths:
            return self._paths[ref]
        if Path(ref).is_file():
            return str(ref)
        raise BackendError(f"no file path for volume ref {ref!r}")


@dataclass(frozen=True)
class ParamSpec:
    type: str  # "number" | "integer" | "string"
    default: object = None
    required: bool = False
    minimum: float | None = None
    maximum: float | None = None


@dataclass(frozen=True)
class BackendInfo:
    backend_id: str
    params_schema: dict[str, ParamSpec]
    factory: Callable[[SessionConfig, VolumeResolver], Session]


def validate_params(schema: dict[str, ParamSpec], params: dict) -> dict:
    """Apply defaults and range checks; unknown keys are rejected."""
    out: dict = {}
    for key in params:
        if key not in schema:
            raise BackendError(f"unknown param {key!r}")
    for name, spec in schema.items():
        if name in params:
            value = params[name]
            if spec.type == "number":
                value = float(value)
            elif spec.type == "integer":
                value = int(value)
            else:
                value = str(value)
            if spec.minimum is not None and value < spec.minimum:
                raise BackendError(f"param {name!r} below minimum {spec.minimum}")
            if spec.maximum is not None and value > spec.maximum:
                raise BackendError(f"param {name!r} above maximum {spec.maximum}")
            out[name] = value
        elif spec.required:
            raise BackendError(f"missing required param {name!r}")
        else:
            out[name] = spec.default
    return out


class BackendRegistry:
    def __init__(self):
        self._backends: dict[str, BackendInfo] = {}

    def register(self, info: BackendInfo) -> None:
        self._backends[info.backend_id] = info

    def get(self, backend_id: str) -> BackendInfo:
        try:
            return self._backends[backend_id]
        except KeyError:
            raise BackendError(f"unknown backend {backend_id!r}") from None

    def ids(self) -> list[str]:
        return sorted(self._backends)

    def describe(self) -> list[dict]:
        out = []
        for backend_id in self.ids():
            info = self._backends[backend_id]
            schema = {
                name: {
                    k: v
                    for k, v in (
                        ("type", spec.type),
                        ("default", spec.default),
                        ("required", spec.required),
                        ("minimum", spec.minimum),
                        ("maximum", spec.maximum),
                    )
                    if v is not None and (k != "required" or v)
                }
                for name, spec in info.params_schema.items()
            }
            out.append({"backend_id": backend_id, "params": schema})
        return out

    def open_session(self, cfg: SessionConfig, resolver: VolumeResolver | None = None) -> Session:
        info = self.get(cfg.backend_id)
        return info.factory(cfg, resolver if resolver is not None else VolumeResolver())


def default_registry() -> BackendRegistry:
    """Registry with the two in-process mock oracles."""
    from .gt_oracle import gt_oracle_backend
    from .threshold_oracle import threshold_oracle_backend

    registry = BackendRegistry()
    registry.register(gt_oracle_backend())
    registry.register(threshold_oracle_backend())
    return registry


def open_session(cfg: SessionConfig, resolver: VolumeResolver | None = None) -> Session:
    return default_registry().open_session(cfg, resolver)


def check_slice_index(z: int, dims: tuple[int, int, int]) -> None:
    if not 0 <= z < dims[0]:
        raise BackendError(f"slice index {z} outside [0, {dims[0]})")
