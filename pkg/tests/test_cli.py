from __future__ import annotations

import json
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from slicetrack.cli import main
from slicetrack.core import tumor_extent
from slicetrack.harness import ellipsoid_phantom, write_phantom_dataset
from slicetrack.ingest import load_nifti, save_nifti
from slicetrack.mesh import parse_obj


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def dataset(tmp_path):
    return write_phantom_dataset(tmp_path / "data", count=2, seed=3)


def test_demo_data(runner, tmp_path):
    result = runner.invoke(main, ["demo-data", "--out", str(tmp_path / "d"), "--count", "2"])
    assert result.exit_code == 0, result.output
    manifest = json.loads((tmp_path / "d" / "manifest.json").read_text())
    assert len(manifest) == 2


def test_eval_writes_report_and_csv(runner, tmp_path, dataset):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        ["eval", "--manifest", str(dataset), "--backend", "gt-oracle",
         "--strategies", "all", "--prompt", "box", "--seed", "1", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert len(report["records"]) == 6
    assert all(r["dice"] == 1.0 for r in report["records"])
    assert out.with_suffix(".csv").exists()


def test_eval_strategy_subset_and_params(runner, tmp_path, dataset):
    out = tmp_path / "r.json"
    result = runner.invoke(
        main,
        ["eval", "--manifest", str(dataset), "--strategies", "center-outward",
         "--param", "drift=0.5", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert {r["strategy"] for r in report["records"]} == {"center-outward"}


def test_eval_partial_failure_exits_nonzero(runner, tmp_path, dataset):
    entries = json.loads(dataset.read_text())
    entries[0]["gt_mask_path"] = str(tmp_path / "gone.nii")
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(entries))
    out = tmp_path / "r.json"
    result = runner.invoke(main, ["eval", "--manifest", str(broken), "--out", str(out)])
    assert result.exit_code == 1
    report = json.loads(out.read_text())
    assert len(report["errors"]) == 1
    assert len(report["records"]) == 3  # the healthy patient


def test_eval_with_external_adapter(runner, tmp_path, dataset):
    out = tmp_path / "r.json"
    cmd = f"{sys.executable} -m slicetrack.backends.reference_adapter"
    result = runner.invoke(
        main,
        ["eval", "--manifest", str(dataset), "--backend", "wire-gt",
         "--backend-cmd", cmd, "--strategies", "center-outward", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert all(r["dice"] == 1.0 for r in report["records"])


def test_segment_interactive_and_mesh(runner, tmp_path):
    volume, gt = ellipsoid_phantom()
    vol_path = tmp_path / "v.nii"
    save_nifti(volume, vol_path)
    extent = tumor_extent(gt)
    bits = gt.bits[extent.z_center]
    ys, xs = np.nonzero(bits)
    prompt_path = tmp_path / "prompt.json"
    prompt_path.write_text(json.dumps({
        "kind": "box", "z": extent.z_center,
        "x_min": int(xs.min()), "y_min": int(ys.min()),
        "x_max": int(xs.max()) + 1, "y_max": int(ys.max()) + 1,
    }))
    out_mask = tmp_path / "pred.nii.gz"
    out_mesh = tmp_path / "pred.obj"
    result = runner.invoke(
        main,
        ["segment", "--volume", str(vol_path), "--prompt-file", str(prompt_path),
         "--strategy", "interactive", "--backend", "threshold-oracle",
         "--param", "tau=100", "--out-mask", str(out_mask), "--out-mesh", str(out_mesh)],
    )
    assert result.exit_code == 0, result.output
    pred = load_nifti(out_mask, mask=True)
    assert np.array_equal(pred.bits, gt.bits)
    assert parse_obj(out_mesh.read_text()).n_triangles > 0


def test_segment_strategy_requires_gt(runner, tmp_path):
    volume, _ = ellipsoid_phantom()
    vol_path = tmp_path / "v.nii"
    save_nifti(volume, vol_path)
    prompt_path = tmp_path / "p.json"
    prompt_path.write_text(json.dumps({
        "kind": "box", "z": 5, "x_min": 0, "y_min": 0, "x_max": 4, "y_max": 4,
    }))
    result = runner.invoke(
        main,
        ["segment", "--volume", str(vol_path), "--prompt-file", str(prompt_path),
         "--strategy", "bottom-to-top", "--out-mask", str(tmp_path / "m.nii")],
    )
    assert result.exit_code != 0
    assert "--gt is required" in result.output


def test_mesh_command(runner, tmp_path):
    _, gt = ellipsoid_phantom()
    mask_path = tmp_path / "gt.nii"
    save_nifti(gt, mask_path)
    out = tmp_path / "gt.obj"
    result = runner.invoke(main, ["mesh", "--mask", str(mask_path), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert parse_obj(out.read_text()).n_triangles > 0
    out_stl = tmp_path / "gt.stl"
    result = runner.invoke(main, ["mesh", "--mask", str(mask_path), "--out", str(out_stl)])
    assert result.exit_code == 0
    assert out_stl.stat().st_size > 84
