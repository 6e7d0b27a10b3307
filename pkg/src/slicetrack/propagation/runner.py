"""Drive a backend session along a plan and assemble the 3D prediction.

Each chain feeds the previous slice's predicted mask forward. A chain that
predicts an empty mask is dead: remaining slices are filled empty without
backend calls. Interactive mode has no known extent, so it walks toward
both volume boundaries and stops a side after a run of empty predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import Mask3D, Prompt, SliceMask2D, Spacing
from ..backends import BackendError, PreviousMask, Session, StepRequest
from .plan import PropagationPlan

GUIDANCE_PREVIOUS = "previous-mask"
GUIDANCE_DEAD = "dead-chain"


@dataclass(frozen=True)
class TraceEntry:
    z: int
    step_index: int
    guidance: str  # "box" | "mask" | "previous-mask" | "dead-chain"
    area: int
    latency_ms: float


@dataclass(frozen=True)
class PropagationTrace:
    entries: tuple[TraceEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> list[dict]:
        return [
            {
                "z": e.z,
                "step_index": e.step_index,
                "guidance": e.guidance,
                "area": e.area,
                "latency_ms": round(e.latency_ms, 3),
            }
            for e in self.entries
        ]


OnStep = Callable[[TraceEntry], None]


def _timed_step(session: Session, z: int, guidance) -> tuple[SliceMask2D, float]:
    try:
        result = session.step(StepRequest(z=z, guidance=guidance))
    except Exception as exc:
        raise BackendError(f"backend step failed at slice {z}: {exc}") from exc
    if result.mask.dims != session.dims[1:]:
        raise BackendError(
            f"backend mask dims {result.mask.dims} do not match volume slices {session.dims[1:]}"
        )
    return result.mask, result.latency_ms


def run_propagation(
    plan: PropagationPlan,
    session: Session,
    initial_prompt: Prompt,
    spacing: Spacing = (1.0, 1.0, 1.0),
    on_step: OnStep | None = None,
) -> tuple[Mask3D, PropagationTrace]:
    """Predict every slice in the plan's range; elsewhere the output is empty."""
    if initial_prompt.z != plan.seed_z:
        raise ValueError(f"prompt slice {initial_prompt.z} does not match plan seed {plan.seed_z}")
    dims = session.dims
    if not 0 <= plan.z_range[0] and plan.z_range[1] < dims[0]:
        raise ValueError(f"plan range {plan.z_range} outside volume depth {dims[0]}")

    out = np.zeros(dims, dtype=bool)
    entries: list[TraceEntry] = []

    def record(z: int, step_index: int, guidance: str, mask: SliceMask2D, latency: float) -> None:
        out[z] = mask.bits
        entry = TraceEntry(z, step_index, guidance, mask.foreground_count(), latency)
        entries.append(entry)
        if on_step is not None:
            on_step(entry)

    seed_mask, latency = _timed_step(session, plan.seed_z, initial_prompt)
    record(plan.seed_z, 0, initial_prompt.kind, seed_mask, latency)

    for chain in plan.chains:
        prev = seed_mask
        dead = prev.is_empty()
        for step_index, z in enumerate(chain, start=1):
            if dead:
                record(z, step_index, GUIDANCE_DEAD, SliceMask2D.zeros(dims[1:]), 0.0)
                continue
            mask, latency = _timed_step(session, z, PreviousMask(prev, step_index))
            record(z, step_index, GUIDANCE_PREVIOUS, mask, latency)
            prev = mask
            dead = prev.is_empty()

    return Mask3D(out, spacing=spacing), PropagationTrace(tuple(entries))


def run_interactive(
    session: Session,
    initial_prompt: Prompt,
    stop_after_empty: int = 2,
    spacing: Spacing = (1.0, 1.0, 1.0),
    on_step: OnStep | None = None,
) -> tuple[Mask3D, PropagationTrace]:
    """Propagate outward from the prompt slice until the track dies.

    A side stops at the volume boundary or after stop_after_empty
    consecutive empty predictions; the empty attempts stay in the trace but
    contribute no foreground.
    """
    if stop_after_empty < 1:
        raise ValueError("stop_after_empty must be >= 1")
    dims = session.dims
    if not 0 <= initial_prompt.z < dims[0]:
        raise ValueError(f"prompt slice {initial_prompt.z} outside volume depth {dims[0]}")

    out = np.zeros(dims, dtype=bool)
    entries: list[TraceEntry] = []

    def record(z: int, step_index: int, guidance: str, mask: SliceMask2D, latency: float) -> None:
        out[z] = mask.bits
        entry = TraceEntry(z, step_index, guidance, mask.foreground_count(), latency)
        entries.append(entry)
        if on_step is not None:
            on_step(entry)

    seed_z = initial_prompt.z
    seed_mask, latency = _timed_step(session, seed_z, initial_prompt)
    record(seed_z, 0, initial_prompt.kind, seed_mask, latency)

    for direction in (1, -1):
        prev = seed_mask
        empty_run = 0
        step_index = 0
        z = seed_z + direction
        while 0 <= z < dims[0] and empty_run < stop_after_empty:
            step_index += 1
            mask, latency = _timed_step(session, z, PreviousMask(prev, step_index))
            record(z, step_index, GUIDANCE_PREVIOUS, mask, latency)
            empty_run = empty_run + 1 if mask.is_empty() else 0
            prev = mask
            z += direction

    return Mask3D(out, spacing=spacing), PropagationTrace(tuple(entries))
