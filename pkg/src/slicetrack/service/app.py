"""HTTP service exposing volumes, prompts, propagation jobs, and meshes.

Uploads are raw NIfTI bytes (optionally gzip) in the request body. Masks
travel as RLE JSON; slices render as 8-bit grayscale PNG. All errors use
the structured {code, message, field?} body.
"""

from __future__ import annotations

import io
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from PIL import Image

from ..backends import BackendError, BackendRegistry, default_registry
from ..core import (
    BoundingBox2D,
    BoxPrompt,
    MaskPrompt,
    Prompt,
    rle_to_json,
    rle_from_json,
)
from ..ingest import NiftiFormatError, window_to_u8
from ..metrics import per_slice_dice, tumor_properties, volumetric_dice
from .jobs import INTERACTIVE, Job, JobError, JobManager
from .models import (
    BoxPromptModel,
    JobCreated,
    JobMetrics,
    JobRequest,
    JobResultRefs,
    JobView,
    MaskPromptModel,
    MaskSet,
    Progress,
    PromptModel,
    SliceRle,
    VolumeCreated,
    VolumeMeta,
)
from .store import StoreError, VolumeStore


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field = field


def _prompt_from_model(model: PromptModel, dims: tuple[int, int, int]) -> Prompt:
    d, h, w = dims
    if not 0 <= model.z < d:
        raise ApiError(400, "invalid_prompt", f"slice {model.z} outside [0, {d})", field="prompt.z")
    if isinstance(model, BoxPromptModel):
        try:
            box = BoundingBox2D(
                x_min=model.x_min, y_min=model.y_min,
                x_max=model.x_max, y_max=model.y_max, z=model.z,
            )
            box.validate_for(dims)
            return BoxPrompt(box)
        except ValueError as exc:
            raise ApiError(400, "invalid_prompt", str(exc), field="prompt") from exc
    try:
        mask = rle_from_json(model.rle.model_dump())
    except ValueError as exc:
        raise ApiError(400, "invalid_prompt", str(exc), field="prompt.rle") from exc
    if mask.dims != (h, w):
        raise ApiError(
            400, "invalid_prompt",
            f"mask dims {mask.dims} do not match volume slices {(h, w)}", field="prompt.rle",
        )
    if mask.is_empty():
        raise ApiError(400, "invalid_prompt", "mask prompt is empty", field="prompt.rle")
    return MaskPrompt(z=model.z, mask=mask)


def _prompt_to_model(prompt: Prompt) -> dict:
    if isinstance(prompt, BoxPrompt):
        box = prompt.box
        return {
            "kind": "box", "z": box.z,
            "x_min": box.x_min, "y_min": box.y_min, "x_max": box.x_max, "y_max": box.y_max,
        }
    return {"kind": "mask", "z": prompt.z, "rle": rle_to_json(prompt.mask)}


def _job_view(job: Job) -> JobView:
    result = None
    if job.state == "done":
        result = JobResultRefs(
            mask=f"/jobs/{job.job_id}/mask",
            mesh=f"/jobs/{job.job_id}/mesh.obj",
            metrics=f"/jobs/{job.job_id}/metrics",
        )
    return JobView(
        job_id=job.job_id,
        volume_id=job.volume_id,
        backend_id=job.backend_id,
        strategy=job.strategy,
        prompt=_prompt_to_model(job.prompt),
        state=job.state,
        progress=Progress(slices_done=job.slices_done, slices_total=job.slices_total),
        error=job.error,
        result=result,
    )


def create_app(
    data_dir: str | Path,
    registry: BackendRegistry | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    registry = registry if registry is not None else default_registry()
    store = VolumeStore(data_dir)
    jobs = JobManager(store, registry)

    app = FastAPI(title="slicetrack", version="0.1.0")
    app.state.store = store
    app.state.jobs = jobs
    app.state.registry = registry

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        body = {"code": exc.code, "message": exc.message}
        if exc.field:
            body["field"] = exc.field
        return JSONResponse(status_code=exc.status, content=body)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", []) if p != "body") or None
        return JSONResponse(
            status_code=400,
            content={
                "code": "validation_error",
                "message": first.get("msg", "invalid request"),
                **({"field": field} if field else {}),
            },
        )

    def _get_volume(volume_id: str):
        try:
            return store.volume(volume_id)
        except StoreError as exc:
            raise ApiError(404, "unknown_volume", str(exc), field="volume_id") from exc

    def _get_job(job_id: str) -> Job:
        try:
            return jobs.get(job_id)
        except JobError as exc:
            raise ApiError(404, "unknown_job", str(exc), field="job_id") from exc

    @app.post("/volumes", response_model=VolumeCreated)
    async def upload_volume(request: Request):
        raw = await request.body()
        if not raw:
            raise ApiError(400, "empty_body", "request body must contain a NIfTI file")
        try:
            volume_id, volume = store.add_volume(raw)
        except NiftiFormatError as exc:
            raise ApiError(400, "bad_nifti", str(exc)) from exc
        return VolumeCreated(volume_id=volume_id, dims=volume.dims, spacing=volume.spacing)

    def _meta(volume_id: str) -> VolumeMeta:
        volume = _get_volume(volume_id)
        return VolumeMeta(
            volume_id=volume_id,
            dims=volume.dims,
            spacing=volume.spacing,
            has_ground_truth=store.ground_truth(volume_id) is not None,
        )

    @app.get("/volumes", response_model=list[VolumeMeta])
    def list_volumes():
        return [_meta(vid) for vid in store.ids()]

    @app.get("/volumes/{volume_id}/meta", response_model=VolumeMeta)
    def volume_meta(volume_id: str):
        return _meta(volume_id)

    @app.get("/volumes/{volume_id}/slices/{z}.png")
    def slice_png(volume_id: str, z: int, p_lo: float = 1.0, p_hi: float = 99.0):
        volume = _get_volume(volume_id)
        if not 0 <= z < volume.dims[0]:
            raise ApiError(404, "bad_slice", f"slice {z} outside [0, {volume.dims[0]})", field="z")
        try:
            pixels = window_to_u8(volume.slice_at(z), p_lo, p_hi)
        except ValueError as exc:
            raise ApiError(400, "bad_window", str(exc)) from exc
        buf = io.BytesIO()
        Image.fromarray(pixels, mode="L").save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.get("/volumes/{volume_id}/ground-truth", response_model=MaskSet)
    def get_ground_truth(volume_id: str):
        _get_volume(volume_id)
        gt = store.ground_truth(volume_id)
        if gt is None:
            raise ApiError(404, "no_ground_truth", "no ground truth registered for this volume")
        slices = [
            SliceRle(z=z, rle=rle_to_json(gt.slice_at(z)))
            for z in range(gt.dims[0])
            if gt.bits[z].any()
        ]
        return MaskSet(volume_id=volume_id, dims=gt.dims, slices=slices)

    @app.put("/volumes/{volume_id}/ground-truth")
    async def put_ground_truth(volume_id: str, request: Request):
        _get_volume(volume_id)
        raw = await request.body()
        if not raw:
            raise ApiError(400, "empty_body", "request body must contain a NIfTI mask")
        try:
            store.set_ground_truth(volume_id, raw)
        except (NiftiFormatError, StoreError) as exc:
            raise ApiError(400, "bad_ground_truth", str(exc)) from exc
        return {"volume_id": volume_id, "ground_truth": True}

    @app.post("/jobs", response_model=JobCreated)
    def submit_job(body: JobRequest):
        volume = _get_volume(body.volume_id)
        try:
            registry.get(body.backend_id)
        except BackendError as exc:
            raise ApiError(400, "unknown_backend", str(exc), field="backend_id") from exc
        prompt = _prompt_from_model(body.prompt, volume.dims)
        try:
            job = jobs.create(
                volume_id=body.volume_id,
                backend_id=body.backend_id,
                strategy=body.strategy,
                prompt=prompt,
                params=body.params,
            )
        except JobError as exc:
            raise ApiError(400, "bad_job", str(exc)) from exc
        return JobCreated(job_id=job.job_id)

    @app.get("/jobs/{job_id}", response_model=JobView)
    def job_status(job_id: str):
        return _job_view(_get_job(job_id))

    def _done_job(job_id: str) -> Job:
        job = _get_job(job_id)
        if job.state != "done":
            raise ApiError(409, "not_done", f"job state is {job.state}")
        return job

    @app.get("/jobs/{job_id}/mask", response_model=MaskSet)
    def job_mask(job_id: str):
        job = _done_job(job_id)
        slices = [
            SliceRle(z=z, rle=rle_to_json(job.mask.slice_at(z)))
            for z in range(job.mask.dims[0])
            if job.mask.bits[z].any()
        ]
        return MaskSet(volume_id=job.volume_id, dims=job.mask.dims, slices=slices)

    @app.get("/jobs/{job_id}/mesh.obj")
    def job_mesh(job_id: str):
        job = _done_job(job_id)
        return Response(content=jobs.mesh_obj(job), media_type="text/plain; charset=ascii")

    @app.get("/jobs/{job_id}/trace")
    def job_trace(job_id: str):
        job = _done_job(job_id)
        return {"job_id": job.job_id, "entries": job.trace.to_json()}

    @app.get("/jobs/{job_id}/metrics", response_model=JobMetrics)
    def job_metrics(job_id: str):
        job = _done_job(job_id)
        gt = store.ground_truth(job.volume_id)
        if gt is None:
            raise ApiError(409, "no_ground_truth", "no ground truth registered for this volume")
        props = tumor_properties(gt, job.prompt.z)
        return JobMetrics(
            volumetric_dice=volumetric_dice(job.mask, gt),
            per_slice_dice=per_slice_dice(job.mask, gt),
            n_tumor_slices=props.n_tumor_slices,
            tumor_volume_voxels=props.tumor_volume_voxels,
            initial_area_voxels=props.initial_area_voxels,
            lesion_count=props.lesion_count,
        )

    @app.get("/backends")
    def list_backends():
        return registry.describe()

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
