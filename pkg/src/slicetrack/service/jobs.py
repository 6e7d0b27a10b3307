"""In-memory job table with one FIFO worker per backend.

Model backends are typically single-accelerator, so jobs for the same
backend run strictly in submission order; different backends run in
parallel. Job state moves queued -> running -> done | failed and progress
never decreases.
"""

from __future__ import annotations

import queue
import threading
import uuid
from dataclasses import dataclass, field

from ..backends import BackendRegistry, SessionConfig, VolumeResolver
from ..core import Mask3D, Prompt, tumor_extent
from ..mesh import extract_surface, obj_bytes
from ..propagation import PropagationTrace, Strategy, build_plan, run_interactive, run_propagation
from .store import VolumeStore

INTERACTIVE = "interactive"


class JobError(ValueError):
    pass


@dataclass
class Job:
    job_id: str
    volume_id: str
    backend_id: str
    strategy: str  # strategy name or "interactive"
    prompt: Prompt
    params: dict
    state: str = "queued"
    slices_done: int = 0
    slices_total: int = 0
    error: str | None = None
    mask: Mask3D | None = None
    trace: PropagationTrace | None = None
    mesh_cache: bytes | None = None
    seed_extent: tuple[int, int, int] | None = None  # (z_first, z_last, seed_z)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class JobManager:
    def __init__(self, store: VolumeStore, registry: BackendRegistry):
        self._store = store
        self._registry = registry
        self._jobs: dict[str, Job] = {}
        self._queues: dict[str, queue.Queue] = {}
        self._lock = threading.Lock()

    def _worker_queue(self, backend_id: str) -> queue.Queue:
        with self._lock:
            q = self._queues.get(backend_id)
            if q is None:
                q = queue.Queue()
                self._queues[backend_id] = q
                thread = threading.Thread(
                    target=self._worker_loop, args=(q,), name=f"jobs-{backend_id}", daemon=True
                )
                thread.start()
        return q

    def submit(self, job: Job) -> str:
        with self._lock:
            self._jobs[job.job_id] = job
        self._worker_queue(job.backend_id).put(job.job_id)
        return job.job_id

    def create(
        self,
        volume_id: str,
        backend_id: str,
        strategy: str,
        prompt: Prompt,
        params: dict,
    ) -> Job:
        """Validate and queue a job; raises JobError before anything runs."""
        volume = self._store.volume(volume_id)
        self._registry.get(backend_id)
        gt = self._store.ground_truth(volume_id)

        if strategy == INTERACTIVE:
            slices_total = volume.dims[0]
            seed_extent = None
        else:
            if gt is None:
                raise JobError(
                    f"strategy {strategy!r} needs a registered ground truth to define the extent"
                )
            extent = tumor_extent(gt)
            plan = build_plan(Strategy(strategy), extent.z_first, extent.z_last,
                              z_center=extent.z_center)
            if prompt.z != plan.seed_z:
                raise JobError(
                    f"prompt slice {prompt.z} does not match the {strategy} seed slice {plan.seed_z}"
                )
            slices_total = plan.coverage_size
            seed_extent = (extent.z_first, extent.z_last, plan.seed_z)

        job = Job(
            job_id=uuid.uuid4().hex[:12],
            volume_id=volume_id,
            backend_id=backend_id,
            strategy=strategy,
            prompt=prompt,
            params=dict(params),
            slices_total=slices_total,
            seed_extent=seed_extent,
        )
        self.submit(job)
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise JobError(f"unknown job {job_id!r}")
        return job

    def _session_params(self, job: Job) -> dict:
        """Inject the per-volume GT reference where the backend declares it."""
        params = dict(job.params)
        schema = self._registry.get(job.backend_id).params_schema
        gt = self._store.ground_truth(job.volume_id)
        if schema:
            if "gt_ref" in schema and gt is not None:
                params.setdefault("gt_ref", f"{job.volume_id}/gt")
        elif gt is not None:
            params.setdefault("gt_path", str(self._store.gt_path(job.volume_id)))
        return params

    def _worker_loop(self, q: queue.Queue) -> None:
        while True:
            job_id = q.get()
            try:
                self._run_job(self.get(job_id))
            except Exception:
                pass  # _run_job stores its own failure; never kill the worker
            finally:
                q.task_done()

    def _run_job(self, job: Job) -> None:
        with job._lock:
            job.state = "running"
        try:
            volume = self._store.volume(job.volume_id)
            resolver = VolumeResolver()
            resolver.register_volume(
                job.volume_id, volume, path=str(self._store.volume_path(job.volume_id))
            )
            gt = self._store.ground_truth(job.volume_id)
            if gt is not None:
                resolver.register_mask(f"{job.volume_id}/gt", gt,
                                       path=str(self._store.gt_path(job.volume_id)))

            cfg = SessionConfig(
                backend_id=job.backend_id,
                volume_ref=job.volume_id,
                params=self._session_params(job),
            )
            session = self._registry.open_session(cfg, resolver)

            def on_step(_entry) -> None:
                with job._lock:
                    job.slices_done += 1

            try:
                if job.strategy == INTERACTIVE:
                    mask, trace = run_interactive(
                        session, job.prompt, spacing=volume.spacing, on_step=on_step
                    )
                else:
                    z_first, z_last, seed_z = job.seed_extent
                    plan = build_plan(Strategy(job.strategy), z_first, z_last, z_center=seed_z)
                    mask, trace = run_propagation(
                        plan, session, job.prompt, spacing=volume.spacing, on_step=on_step
                    )
            finally:
                session.close()

            with job._lock:
                job.mask = mask
                job.trace = trace
                if job.strategy == INTERACTIVE:
                    job.slices_total = len(trace)
                job.state = "done"
        except Exception as exc:
            with job._lock:
                job.error = str(exc)
                job.state = "failed"

    def mesh_obj(self, job: Job) -> bytes:
        """Surface mesh of the predicted mask, built once and cached."""
        with job._lock:
            if job.state != "done":
                raise JobError("job result not available yet")
            if job.mesh_cache is None:
                job.mesh_cache = obj_bytes(extract_surface(job.mask))
            return job.mesh_cache
