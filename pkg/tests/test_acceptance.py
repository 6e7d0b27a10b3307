"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured runtime. Run with `pytest -s tests/test_acceptance.py`
to see the lines; any assertion failure fails the criterion.
"""

from __future__ import annotations

import json
import sys
import time
from collections import Counter

import numpy as np
import pytest

from slicetrack.backends import SessionConfig, VolumeResolver, open_session
from slicetrack.core import Mask3D, SliceMask2D, rle_decode, rle_encode, tumor_extent
from slicetrack.harness import (
    build_report,
    derive_prompt,
    ellipsoid_phantom,
    evaluate_manifest,
    horseshoe_distractor_phantom,
    uniform_slab_phantom,
    write_phantom_dataset,
    write_records_csv,
    write_report_json,
)
from slicetrack.ingest import load_manifest, load_nifti, save_nifti
from slicetrack.mesh import extract_surface, mesh_area, mesh_volume
from slicetrack.metrics import ols_fit, volumetric_dice
from slicetrack.propagation import ALL_STRATEGIES, Strategy, build_plan, run_propagation

from .conftest import blob_mask3d
from .test_metrics import normal_equations_fit


def report_pass(name: str, started: float, budget_s: float) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < budget_s, f"{name} took {elapsed:.2f}s, budget {budget_s}s"
    print(f"\nACCEPTANCE PASS: {name} ({elapsed:.2f}s < {budget_s}s)")


def test_dice_oracle_equivalence():
    """1000 random 8x8x8 pairs: Dice matches a brute-force voxel counter
    exactly, bit for bit in numerator and denominator."""
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        p = Mask3D(rng.random((8, 8, 8)) < rng.uniform(0.05, 0.9))
        g = Mask3D(rng.random((8, 8, 8)) < rng.uniform(0.05, 0.9))
        num = 0
        den = 0
        for z in range(8):
            for y in range(8):
                for x in range(8):
                    pv = bool(p.bits[z, y, x])
                    gv = bool(g.bits[z, y, x])
                    num += 2 * (pv and gv)
                    den += pv + gv
        expected = 1.0 if den == 0 else num / den
        from slicetrack.metrics import dice_counts

        assert dice_counts(p, g) == (num, den)
        assert volumetric_dice(p, g) == expected
    report_pass("Dice oracle equivalence (1000 volumes)", started, 5.0)


def test_identity_pipeline(tmp_path):
    """>= 20 ellipsoid phantoms, gt-oracle drift 0: Dice exactly 1.0 for all
    strategies and both prompt kinds."""
    started = time.perf_counter()
    manifest = load_manifest(write_phantom_dataset(tmp_path / "data", count=20, seed=11))
    for prompt_kind in ("box", "mask"):
        outcome = evaluate_manifest(manifest, backend_id="gt-oracle", prompt_kind=prompt_kind)
        assert outcome.ok, outcome.errors
        assert len(outcome.records) == 60
        assert all(r.dice == 1.0 for r in outcome.records)
    report_pass("Identity pipeline (20 phantoms x 3 strategies x 2 prompt kinds)", started, 10.0)


def test_strategy_ordering_under_drift(tmp_path):
    """Uniform-slice phantoms, drift in {0.5, 1.0}: center-outward Dice >=
    both end-start strategies per phantom; strictly greater at span >= 9
    with drift 1.0."""
    started = time.perf_counter()
    spans = (9, 10, 12, 15, 20)
    for drift in (0.5, 1.0):
        for span in spans:
            volume, gt = uniform_slab_phantom((span + 12, 31, 31), 5, 5 + span, side=21)
            resolver = VolumeResolver()
            resolver.register_volume("v", volume)
            resolver.register_mask("g", gt)
            extent = tumor_extent(gt)
            scores = {}
            for strategy in ALL_STRATEGIES:
                plan = build_plan(strategy, extent.z_first, extent.z_last,
                                  z_center=extent.z_center)
                session = open_session(
                    SessionConfig("gt-oracle", "v", {"gt_ref": "g", "drift": drift}), resolver
                )
                pred, _ = run_propagation(plan, session, derive_prompt(gt, plan.seed_z, "box"))
                session.close()
                scores[strategy] = volumetric_dice(pred, gt)
            co = scores[Strategy.CENTER_OUTWARD]
            assert co >= scores[Strategy.BOTTOM_TO_TOP], (drift, span, scores)
            assert co >= scores[Strategy.TOP_TO_BOTTOM], (drift, span, scores)
            if drift == 1.0:
                assert co > scores[Strategy.BOTTOM_TO_TOP], (span, scores)
                assert co > scores[Strategy.TOP_TO_BOTTOM], (span, scores)
    report_pass("Strategy ordering under drift (spans 9..20, drift 0.5/1.0)", started, 10.0)


def test_prompt_kind_refinement(tmp_path):
    """threshold-oracle on distractor phantoms: mask-prompt Dice >=
    box-prompt Dice for every phantom (and strictly better overall)."""
    started = time.perf_counter()
    improvements = []
    for i, (z_first, z_last) in enumerate(((4, 12), (3, 9), (5, 13), (2, 10))):
        distractor_z = (z_first + z_last) // 2
        volume, gt = horseshoe_distractor_phantom(
            (16, 24 + i, 24), z_first, z_last, distractor_z=distractor_z
        )
        resolver = VolumeResolver()
        resolver.register_volume("v", volume)
        extent = tumor_extent(gt)
        plan = build_plan(Strategy.CENTER_OUTWARD, extent.z_first, extent.z_last,
                          z_center=extent.z_center)
        scores = {}
        for kind in ("box", "mask"):
            session = open_session(
                SessionConfig("threshold-oracle", "v", {"tau": 100.0}), resolver
            )
            pred, _ = run_propagation(plan, session, derive_prompt(gt, plan.seed_z, kind))
            session.close()
            scores[kind] = volumetric_dice(pred, gt)
        assert scores["mask"] >= scores["box"], scores
        improvements.append(scores["mask"] - scores["box"])
    assert max(improvements) > 0.5  # the improvement direction is substantial
    report_pass("Prompt-kind refinement (mask >= box on 4 distractor phantoms)", started, 10.0)


def test_plan_coverage_exhaustive():
    """Spans 1..500: chains + seed cover the extent exactly once and the
    max step index matches the closed-form bounds."""
    started = time.perf_counter()
    for span in range(1, 501):
        z_lo, z_hi = 3, 3 + span
        for strategy in ALL_STRATEGIES:
            plan = build_plan(strategy, z_lo, z_hi)
            covered = [plan.seed_z]
            for chain in plan.chains:
                covered.extend(chain)
            counts = Counter(covered)
            assert set(counts) == set(range(z_lo, z_hi + 1)), (strategy, span)
            assert all(v == 1 for v in counts.values()), (strategy, span)
            if strategy is Strategy.CENTER_OUTWARD:
                assert plan.max_step_index == -(-span // 2)
            else:
                assert plan.max_step_index == span
    report_pass("Plan coverage exhaustive (spans 1..500, all strategies)", started, 1.0)


def test_codec_and_file_roundtrips(tmp_path):
    """RLE: 1000 random masks roundtrip exactly. NIfTI: save->load is exact
    for all supported dtypes, gzip on and off."""
    started = time.perf_counter()
    rng = np.random.default_rng(55)
    for _ in range(1000):
        mask = SliceMask2D(rng.random((16, 16)) < rng.uniform(0.1, 0.9))
        assert np.array_equal(rle_decode(rle_encode(mask), mask.dims).bits, mask.bits)

    from slicetrack.core import IntensityVolume

    for dtype in ("uint8", "int16", "uint16", "float32"):
        for use_gzip in (False, True):
            if dtype == "float32":
                data = rng.normal(size=(5, 6, 7)).astype(np.float32)
            else:
                info = np.iinfo(dtype)
                data = rng.integers(
                    max(info.min, -1000), min(info.max, 1000), (5, 6, 7)
                ).astype(np.float32)
            volume = IntensityVolume(data, spacing=(2.0, 0.75, 0.75))
            path = tmp_path / f"{dtype}-{use_gzip}.nii"
            save_nifti(volume, path, gzip_out=use_gzip, dtype=dtype)
            loaded = load_nifti(path)
            assert np.array_equal(loaded.voxels, volume.voxels), (dtype, use_gzip)
            assert loaded.spacing == volume.spacing
    report_pass("Codec/file roundtrips (1000 RLE masks, NIfTI dtypes x gzip)", started, 10.0)


def test_ols_correctness():
    """Exact line recovery at 1e-9; agreement with a normal-equations oracle
    within 1e-6 relative on 100 seeded datasets; residual orthogonality."""
    started = time.perf_counter()
    fit = ols_fit([(float(x), 2.0 * x + 1.0) for x in range(20)])
    assert abs(fit.slope - 2.0) <= 1e-9
    assert abs(fit.intercept - 1.0) <= 1e-9
    assert abs(fit.r_squared - 1.0) <= 1e-9

    rng = np.random.default_rng(808)
    for _ in range(100):
        n = int(rng.integers(3, 60))
        xs = rng.uniform(-20, 20, n)
        ys = rng.uniform(-4, 4) * xs + rng.uniform(-10, 10) + rng.normal(size=n)
        points = list(zip(xs, ys))
        fit = ols_fit(points)
        slope, intercept, r2 = normal_equations_fit(points)
        assert fit.slope == pytest.approx(slope, rel=1e-6, abs=1e-12)
        assert fit.intercept == pytest.approx(intercept, rel=1e-6, abs=1e-9)
        assert fit.r_squared == pytest.approx(r2, rel=1e-6, abs=1e-9)
        residuals = ys - (fit.slope * xs + fit.intercept)
        assert abs(((xs - xs.mean()) * residuals).sum()) < 1e-9 * max(1.0, abs(xs).max() * n)
    report_pass("OLS correctness (exact line + 100 oracle datasets)", started, 1.0)


def test_mesh_invariants():
    """Single-voxel cube exactness; watertightness and area/volume
    identities on 100 seeded random blob masks within 1e-6 relative."""
    started = time.perf_counter()
    cube = extract_surface(Mask3D(np.ones((1, 1, 1), bool)), (1.0, 1.0, 1.0))
    assert cube.n_vertices == 8 and cube.n_triangles == 12
    assert mesh_area(cube) == pytest.approx(6.0, abs=1e-12)
    edges = Counter()
    for a, b, c in cube.triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            edges[frozenset((u, v))] += 1
    assert cube.n_vertices - len(edges) + cube.n_triangles == 2

    from .test_mesh import expected_exposed_area, is_watertight

    rng = np.random.default_rng(4242)
    for _ in range(100):
        m = blob_mask3d(rng, spacing=(1.5, 0.8, 1.1))
        mesh = extract_surface(m)
        assert is_watertight(mesh)
        sz, sy, sx = m.spacing
        assert mesh_area(mesh) == pytest.approx(expected_exposed_area(m), rel=1e-6)
        assert mesh_volume(mesh) == pytest.approx(
            m.foreground_count() * sz * sy * sx, rel=1e-6
        )
    report_pass("Mesh invariants (cube exact + 100 random masks)", started, 10.0)


def test_protocol_conformance(tmp_path):
    """A scripted stdio adapter with gt-oracle semantics produces
    byte-identical volumes to the in-process gt-oracle for all strategies."""
    started = time.perf_counter()
    from slicetrack.backends import WireSession

    volume, gt = ellipsoid_phantom()
    vol_path = tmp_path / "v.nii"
    gt_path = tmp_path / "g.nii"
    save_nifti(volume, vol_path)
    save_nifti(gt, gt_path)
    argv = [sys.executable, "-m", "slicetrack.backends.reference_adapter"]
    extent = tumor_extent(gt)
    params = {"drift": 0.5, "flip_prob": 0.1, "seed": 77}
    for strategy in ALL_STRATEGIES:
        plan = build_plan(strategy, extent.z_first, extent.z_last, z_center=extent.z_center)
        prompt = derive_prompt(gt, plan.seed_z, "box")

        wire = WireSession(argv, str(vol_path), {"gt_path": str(gt_path), **params})
        wire_pred, _ = run_propagation(plan, wire, prompt)
        wire.close()

        resolver = VolumeResolver()
        resolver.register_volume("v", volume)
        resolver.register_mask("g", gt)
        local = open_session(SessionConfig("gt-oracle", "v", {"gt_ref": "g", **params}), resolver)
        local_pred, _ = run_propagation(plan, local, prompt)
        local.close()

        assert np.array_equal(wire_pred.bits, local_pred.bits), strategy
    report_pass("Protocol conformance (stdio adapter == in-process, 3 strategies)", started, 5.0)


def test_report_determinism(tmp_path):
    """Two identical cli_eval runs produce byte-identical report JSON."""
    started = time.perf_counter()
    manifest = load_manifest(write_phantom_dataset(tmp_path / "data", count=5, seed=99))
    outputs = []
    for run in range(2):
        outcome = evaluate_manifest(
            manifest, backend_id="gt-oracle", prompt_kind="box", seed=4,
            user_params={"drift": 0.5, "flip_prob": 0.05},
        )
        report = build_report(outcome)
        path = tmp_path / f"report-{run}.json"
        write_report_json(report, path)
        write_records_csv(outcome.records, path.with_suffix(".csv"))
        outputs.append((path.read_bytes(), path.with_suffix(".csv").read_bytes()))
    assert outputs[0][0] == outputs[1][0]
    assert outputs[0][1] == outputs[1][1]
    report_pass("Report determinism (byte-identical JSON and CSV)", started, 10.0)
