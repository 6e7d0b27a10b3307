"""Batch evaluation: propagate every patient with every strategy, score it.

Prompts are derived from ground truth at each strategy's seed slice: the
tight bounding box for box prompts, the full GT slice mask for mask
prompts. Patients are evaluated independently; one patient's failure is
recorded and does not stop the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from ..backends import BackendRegistry, SessionConfig, VolumeResolver, default_registry
from ..core import (
    BoundingBox2D,
    BoxPrompt,
    IntensityVolume,
    Mask3D,
    MaskPrompt,
    Prompt,
    bbox_from_slice_mask,
    tumor_extent,
)
from ..ingest import DatasetManifest, load_nifti
from ..metrics import EvalRecord, tumor_properties, volumetric_dice
from ..propagation import ALL_STRATEGIES, Strategy, build_plan, run_propagation


@dataclass(frozen=True)
class PatientError:
    patient_id: str
    message: str


@dataclass
class EvalOutcome:
    records: list[EvalRecord]
    errors: list[PatientError]

    @property
    def ok(self) -> bool:
        return not self.errors


def derive_prompt(gt: Mask3D, seed_z: int, kind: str, pad: int = 0) -> Prompt:
    """Build the evaluation prompt from ground truth at the seed slice."""
    gt_slice = gt.slice_at(seed_z)
    if kind == "box":
        box = bbox_from_slice_mask(gt_slice)
        if box is None:
            raise ValueError(f"empty ground truth at seed slice {seed_z}")
        if pad:
            d, h, w = gt.dims
            box = BoundingBox2D(
                x_min=max(0, box.x_min - pad),
                y_min=max(0, box.y_min - pad),
                x_max=min(w, box.x_max + pad),
                y_max=min(h, box.y_max + pad),
            )
        return BoxPrompt(box.at_slice(seed_z))
    if kind == "mask":
        if gt_slice.is_empty():
            raise ValueError(f"empty ground truth at seed slice {seed_z}")
        return MaskPrompt(z=seed_z, mask=gt_slice)
    raise ValueError(f"unknown prompt kind {kind!r}")


def _session_params(
    registry: BackendRegistry,
    backend_id: str,
    user_params: dict,
    gt_ref: str,
    gt_path: str,
    seed: int,
) -> dict:
    """Merge user params with the per-patient GT reference and seed.

    Mock backends declare their schema, so only declared keys are injected;
    wire backends take an open schema and get the GT as a file path.
    """
    params = dict(user_params)
    schema = registry.get(backend_id).params_schema
    if schema:
        if "gt_ref" in schema:
            params.setdefault("gt_ref", gt_ref)
        if "seed" in schema:
            params.setdefault("seed", seed)
    else:
        params.setdefault("gt_path", gt_path)
        params.setdefault("seed", seed)
    return params


def evaluate_patient(
    patient_id: str,
    volume: IntensityVolume,
    gt: Mask3D,
    backend_id: str,
    strategies: Sequence[Strategy],
    prompt_kind: str,
    registry: BackendRegistry,
    resolver: VolumeResolver,
    volume_ref: str,
    gt_ref: str,
    gt_path: str,
    seed: int,
    user_params: dict,
    center_rule: str = "midpoint",
    pad: int = 0,
) -> list[EvalRecord]:
    if volume.dims != gt.dims:
        raise ValueError(f"volume dims {volume.dims} do not match ground truth {gt.dims}")
    extent = tumor_extent(gt, center_rule)
    records = []
    for strategy in strategies:
        plan = build_plan(strategy, extent.z_first, extent.z_last, z_center=extent.z_center)
        prompt = derive_prompt(gt, plan.seed_z, prompt_kind, pad)
        params = _session_params(registry, backend_id, user_params, gt_ref, gt_path, seed)
        session = registry.open_session(
            SessionConfig(backend_id=backend_id, volume_ref=volume_ref, params=params),
            resolver,
        )
        try:
            prediction, _ = run_propagation(plan, session, prompt, spacing=volume.spacing)
        finally:
            session.close()
        props = tumor_properties(gt, plan.seed_z)
        records.append(
            EvalRecord(
                patient_id=patient_id,
                strategy=strategy,
                prompt_kind=prompt_kind,
                dice=volumetric_dice(prediction, gt),
                n_tumor_slices=props.n_tumor_slices,
                tumor_volume_voxels=props.tumor_volume_voxels,
                initial_area_voxels=props.initial_area_voxels,
                lesion_count=props.lesion_count,
            )
        )
    return records


def evaluate_manifest(
    manifest: DatasetManifest,
    backend_id: str,
    strategies: Sequence[Strategy] | None = None,
    prompt_kind: str = "box",
    seed: int = 0,
    user_params: dict | None = None,
    registry: BackendRegistry | None = None,
    center_rule: str = "midpoint",
    pad: int = 0,
    on_patient: Callable[[str], None] | None = None,
) -> EvalOutcome:
    """Evaluate every manifest patient; failures are isolated per patient."""
    registry = registry if registry is not None else default_registry()
    strategies = tuple(strategies) if strategies else ALL_STRATEGIES
    user_params = user_params or {}
    records: list[EvalRecord] = []
    errors: list[PatientError] = []
    for entry in manifest.entries:
        if on_patient is not None:
            on_patient(entry.patient_id)
        try:
            volume = load_nifti(entry.image_path)
            gt = load_nifti(entry.gt_mask_path, mask=True)
            resolver = VolumeResolver()
            volume_ref = f"{entry.patient_id}/image"
            gt_ref = f"{entry.patient_id}/gt"
            resolver.register_volume(volume_ref, volume, path=entry.image_path)
            resolver.register_mask(gt_ref, gt, path=entry.gt_mask_path)
            records.extend(
                evaluate_patient(
                    patient_id=entry.patient_id,
                    volume=volume,
                    gt=gt,
                    backend_id=backend_id,
                    strategies=strategies,
                    prompt_kind=prompt_kind,
                    registry=registry,
                    resolver=resolver,
                    volume_ref=volume_ref,
                    gt_ref=gt_ref,
                    gt_path=entry.gt_mask_path,
                    seed=seed,
                    user_params=user_params,
                    center_rule=center_rule,
                    pad=pad,
                )
            )
        except Exception as exc:
            errors.append(PatientError(patient_id=entry.patient_id, message=str(exc)))
    records.sort(key=lambda r: (r.patient_id, r.strategy.value))
    return EvalOutcome(records=records, errors=errors)
