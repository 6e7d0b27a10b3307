"""Request/response schemas for the HTTP API."""

from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, Field


class RleModel(BaseModel):
    dims: list[int] = Field(min_length=2, max_length=2)
    counts: list[int]


class BoxPromptModel(BaseModel):
    kind: Literal["box"]
    z: int
    x_min: int
    y_min: int
    x_max: int
    y_max: int


class MaskPromptModel(BaseModel):
    kind: Literal["mask"]
    z: int
    rle: RleModel


PromptModel = Union[BoxPromptModel, MaskPromptModel]


class VolumeMeta(BaseModel):
    volume_id: str
    dims: tuple[int, int, int]
    spacing: tuple[float, float, float]
    has_ground_truth: bool


class VolumeCreated(BaseModel):
    volume_id: str
    dims: tuple[int, int, int]
    spacing: tuple[float, float, float]


class JobRequest(BaseModel):
    volume_id: str
    prompt: PromptModel = Field(discriminator="kind")
    strategy: Literal["bottom-to-top", "top-to-bottom", "center-outward", "interactive"]
    backend_id: str
    params: dict[str, Union[float, int, str]] = Field(default_factory=dict)


class JobCreated(BaseModel):
    job_id: str


class Progress(BaseModel):
    slices_done: int
    slices_total: int


class JobResultRefs(BaseModel):
    mask: str
    mesh: str
    metrics: str | None = None


class JobView(BaseModel):
    job_id: str
    volume_id: str
    backend_id: str
    strategy: str
    prompt: PromptModel
    state: Literal["queued", "running", "done", "failed"]
    progress: Progress
    error: str | None = None
    result: JobResultRefs | None = None


class SliceRle(BaseModel):
    z: int
    rle: RleModel


class MaskSet(BaseModel):
    volume_id: str
    dims: tuple[int, int, int]
    slices: list[SliceRle]


class JobMetrics(BaseModel):
    volumetric_dice: float
    per_slice_dice: dict[int, float]
    n_tumor_slices: int
    tumor_volume_voxels: int
    initial_area_voxels: int
    lesion_count: int


class ApiErrorBody(BaseModel):
    code: str
    message: str
    field: str | None = None
