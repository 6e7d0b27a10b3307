"""Synthetic volumes with analytically known ground truth.

Used by the test suite and the demo-data command; real scans enter through
dataset manifests instead.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..core import IntensityVolume, Mask3D, Spacing

LESION_VALUE = 200.0
BACKGROUND_VALUE = 10.0


def ellipsoid_mask(
    dims: tuple[int, int, int],
    center: tuple[float, float, float],
    radii: tuple[float, float, float],
) -> np.ndarray:
    """Lattice points (z, y, x) with sum(((i - c) / r)^2) <= 1."""
    d, h, w = dims
    zz, yy, xx = np.ogrid[0:d, 0:h, 0:w]
    cz, cy, cx = center
    rz, ry, rx = radii
    return (
        ((zz - cz) / rz) ** 2 + ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2
    ) <= 1.0


def ellipsoid_phantom(
    dims: tuple[int, int, int] = (16, 24, 24),
    center: tuple[float, float, float] | None = None,
    radii: tuple[float, float, float] = (3.0, 5.0, 5.0),
    spacing: Spacing = (1.0, 1.0, 1.0),
) -> tuple[IntensityVolume, Mask3D]:
    """Bright solid ellipsoid on a dark background."""
    if center is None:
        center = tuple((n - 1) / 2.0 for n in dims)
    bits = ellipsoid_mask(dims, center, radii)
    voxels = np.where(bits, LESION_VALUE, BACKGROUND_VALUE).astype(np.float32)
    return IntensityVolume(voxels, spacing), Mask3D(bits, spacing)


def uniform_slab_phantom(
    dims: tuple[int, int, int],
    z_first: int,
    z_last: int,
    side: int,
    spacing: Spacing = (1.0, 1.0, 1.0),
) -> tuple[IntensityVolume, Mask3D]:
    """The same centered square on every slice of [z_first, z_last].

    Per-slice ground truth is identical across the extent, which makes
    chain-length effects of propagation strategies exactly comparable.
    """
    d, h, w = dims
    if not 0 <= z_first <= z_last < d:
        raise ValueError("extent outside volume")
    if side > min(h, w):
        raise ValueError("square larger than slice")
    y0 = (h - side) // 2
    x0 = (w - side) // 2
    bits = np.zeros(dims, dtype=bool)
    bits[z_first : z_last + 1, y0 : y0 + side, x0 : x0 + side] = True
    voxels = np.where(bits, LESION_VALUE, BACKGROUND_VALUE).astype(np.float32)
    return IntensityVolume(voxels, spacing), Mask3D(bits, spacing)


def horseshoe_distractor_phantom(
    dims: tuple[int, int, int],
    z_first: int,
    z_last: int,
    distractor_z: int,
    spacing: Spacing = (1.0, 1.0, 1.0),
) -> tuple[IntensityVolume, Mask3D]:
    """Horseshoe lesion whose tight box is centered on background, plus one
    bright distractor pixel at that box center on a single slice.

    The distractor is bright in the image but background in the ground
    truth: a box prompt over the tight lesion box contains it, a mask prompt
    excludes it.
    """
    d, h, w = dims
    if not 0 <= z_first <= distractor_z <= z_last < d:
        raise ValueError("distractor slice outside extent")
    side = 11
    y0 = (h - side) // 2
    x0 = (w - side) // 2
    shoe = np.zeros((h, w), dtype=bool)
    shoe[y0 : y0 + side, x0 : x0 + side] = True
    # Open the square into a horseshoe: carve a cavity plus a mouth so the
    # box center (y0 + 5, x0 + 5) is background.
    shoe[y0 + 3 : y0 + side, x0 + 3 : x0 + 8] = False
    bits = np.zeros(dims, dtype=bool)
    bits[z_first : z_last + 1] = shoe
    voxels = np.where(bits, LESION_VALUE, BACKGROUND_VALUE).astype(np.float32)
    voxels[distractor_z, y0 + 5, x0 + 5] = LESION_VALUE
    return IntensityVolume(voxels, spacing), Mask3D(bits, spacing)


def write_phantom_dataset(out_dir: str | Path, count: int = 3, seed: int = 7) -> Path:
    """Write `count` ellipsoid phantoms plus a manifest; returns its path."""
    from ..ingest import save_nifti

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(count):
        dims = (16, 24, 24)
        center = (
            float(rng.uniform(6, 9)),
            float(rng.uniform(10, 13)),
            float(rng.uniform(10, 13)),
        )
        radii = (
            float(rng.uniform(2.5, 4.0)),
            float(rng.uniform(4.0, 6.0)),
            float(rng.uniform(4.0, 6.0)),
        )
        volume, gt = ellipsoid_phantom(dims, center, radii, spacing=(2.0, 0.7, 0.7))
        pid = f"phantom-{i:03d}"
        image_path = out / f"{pid}_image.nii.gz"
        gt_path = out / f"{pid}_gt.nii.gz"
        save_nifti(volume, image_path, gzip_out=True)
        save_nifti(gt, gt_path, gzip_out=True)
        entries.append(
            {
                "patient_id": pid,
                "image_path": str(image_path),
                "gt_mask_path": str(gt_path),
            }
        )
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(entries, indent=2) + "\n")
    return manifest_path
