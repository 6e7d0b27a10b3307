"""Volumetric and per-slice Dice overlap.

Dice(P, G) = 2|P intersect G| / (|P| + |G|), aggregated over all voxels
before dividing. Two empty volumes count as perfect agreement (1.0).
"""

from __future__ import annotations

from ..core import Mask3D


def dice_counts(p: Mask3D, g: Mask3D) -> tuple[int, int]:
    """(2 * intersection, |P| + |G|) as exact integers."""
    if p.dims != g.dims:
        raise ValueError(f"dims mismatch: {p.dims} vs {g.dims}")
    intersection = int((p.bits & g.bits).sum())
    total = int(p.bits.sum()) + int(g.bits.sum())
    return 2 * intersection, total


def volumetric_dice(p: Mask3D, g: Mask3D) -> float:
    numerator, denominator = dice_counts(p, g)
    if denominator == 0:
        return 1.0
    return numerator / denominator


def per_slice_dice(p: Mask3D, g: Mask3D) -> dict[int, float]:
    """Dice per axial slice, same both-empty rule."""
    if p.dims != g.dims:
        raise ValueError(f"dims mismatch: {p.dims} vs {g.dims}")
    inter = (p.bits & g.bits).sum(axis=(1, 2))
    totals = p.bits.sum(axis=(1, 2)) + g.bits.sum(axis=(1, 2))
    out: dict[int, float] = {}
    for z in range(p.dims[0]):
        total = int(totals[z])
        out[z] = 1.0 if total == 0 else 2 * int(inter[z]) / total
    return out
