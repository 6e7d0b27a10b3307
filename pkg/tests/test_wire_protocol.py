from __future__ import annotations

import io
import json
import sys
import textwrap

import numpy as np
import pytest

from slicetrack.backends import (
    BackendError,
    ProtocolError,
    SessionConfig,
    StepRequest,
    VolumeResolver,
    WireSession,
    open_session,
)
from slicetrack.backends.reference_adapter import serve
from slicetrack.core import BoundingBox2D, BoxPrompt, tumor_extent
from slicetrack.harness import derive_prompt, ellipsoid_phantom
from slicetrack.ingest import save_nifti
from slicetrack.propagation import Strategy, build_plan, run_propagation

ADAPTER_ARGV = [sys.executable, "-m", "slicetrack.backends.reference_adapter"]


@pytest.fixture
def phantom_files(tmp_path):
    volume, gt = ellipsoid_phantom()
    vol_path = tmp_path / "vol.nii"
    gt_path = tmp_path / "gt.nii"
    save_nifti(volume, vol_path)
    save_nifti(gt, gt_path)
    return volume, gt, str(vol_path), str(gt_path)


class TestAdapterLoop:
    """Drive the adapter's message handler in-process through serve()."""

    def run_lines(self, *messages: dict) -> list[dict]:
        stdin = io.StringIO("\n".join(json.dumps(m) for m in messages) + "\n")
        stdout = io.StringIO()
        serve(stdin=stdin, stdout=stdout)
        return [json.loads(line) for line in stdout.getvalue().splitlines()]

    def test_hello(self):
        replies = self.run_lines({"id": 1, "op": "hello"})
        assert replies[0] == {
            "id": 1, "ok": True, "protocol": "vp/1", "backend": "reference-gt",
        }

    def test_open_echoes_dims(self, phantom_files):
        volume, _, vol_path, gt_path = phantom_files
        replies = self.run_lines(
            {"id": 1, "op": "hello"},
            {"id": 2, "op": "open", "volume_path": vol_path, "params": {"gt_path": gt_path}},
        )
        assert replies[1]["ok"] and replies[1]["dims"] == list(volume.dims)

    def test_step_before_open_fails(self):
        replies = self.run_lines(
            {"id": 1, "op": "step", "z": 0, "guidance": {"kind": "box",
             "x_min": 0, "y_min": 0, "x_max": 2, "y_max": 2}},
        )
        assert replies[0]["ok"] is False
        assert "open" in replies[0]["error"]

    def test_unknown_op_and_bad_json(self):
        stdin = io.StringIO('{"id": 5, "op": "dance"}\nnot json\n')
        stdout = io.StringIO()
        serve(stdin=stdin, stdout=stdout)
        replies = [json.loads(line) for line in stdout.getvalue().splitlines()]
        assert replies[0] == {"id": 5, "ok": False, "error": "unknown op 'dance'"}
        assert replies[1]["ok"] is False and replies[1]["id"] is None

    def test_stdout_is_protocol_only(self, phantom_files):
        _, _, vol_path, gt_path = phantom_files
        replies = self.run_lines(
            {"id": 1, "op": "hello"},
            {"id": 2, "op": "open", "volume_path": vol_path, "params": {"gt_path": gt_path}},
            {"id": 3, "op": "step", "z": 7, "guidance": {"kind": "box",
             "x_min": 8, "y_min": 8, "x_max": 16, "y_max": 16}},
            {"id": 4, "op": "close"},
        )
        assert [r["id"] for r in replies] == [1, 2, 3, 4]
        assert all(r["ok"] for r in replies)


class TestWireSession:
    def test_step_masks_match_in_process_oracle(self, phantom_files):
        volume, gt, vol_path, gt_path = phantom_files
        params = {"gt_path": gt_path, "drift": 0.5, "seed": 11, "flip_prob": 0.05}
        wire = WireSession(ADAPTER_ARGV, vol_path, params)
        assert wire.dims == volume.dims

        resolver = VolumeResolver()
        resolver.register_volume("v", volume)
        resolver.register_mask("g", gt)
        local = open_session(
            SessionConfig("gt-oracle", "v",
                          {"gt_ref": "g", "drift": 0.5, "seed": 11, "flip_prob": 0.05}),
            resolver,
        )
        extent = tumor_extent(gt)
        plan = build_plan(Strategy.CENTER_OUTWARD, extent.z_first, extent.z_last,
                          z_center=extent.z_center)
        prompt = derive_prompt(gt, plan.seed_z, "box")
        wire_pred, _ = run_propagation(plan, wire, prompt)
        local_pred, _ = run_propagation(plan, local, prompt)
        wire.close()
        local.close()
        assert np.array_equal(wire_pred.bits, local_pred.bits)

    def test_adapter_error_propagates(self, phantom_files):
        _, _, vol_path, gt_path = phantom_files
        wire = WireSession(ADAPTER_ARGV, vol_path, {"gt_path": gt_path})
        with pytest.raises(BackendError, match="slice index"):
            wire.step(StepRequest(999, BoxPrompt(BoundingBox2D(0, 0, 2, 2, z=999))))
        wire.close()

    def test_close_twice(self, phantom_files):
        _, _, vol_path, gt_path = phantom_files
        wire = WireSession(ADAPTER_ARGV, vol_path, {"gt_path": gt_path})
        wire.close()
        with pytest.raises(BackendError, match="closed"):
            wire.close()

    def test_open_failure_surfaces_adapter_message(self, phantom_files, tmp_path):
        _, _, vol_path, _ = phantom_files
        with pytest.raises(ProtocolError, match="gt_path"):
            WireSession(ADAPTER_ARGV, vol_path, {})

    def test_launch_failure(self):
        with pytest.raises(BackendError, match="failed to launch"):
            WireSession(["/no/such/adapter"], "x.nii", {})

    def test_unresponsive_adapter_is_killed(self, tmp_path, phantom_files):
        _, _, vol_path, gt_path = phantom_files
        script = tmp_path / "stubborn.py"
        script.write_text(textwrap.dedent("""
            import json, sys, time
            for line in sys.stdin:
                msg = json.loads(line)
                op = msg.get("op")
                if op == "hello":
                    out = {"id": msg["id"], "ok": True, "protocol": "vp/1", "backend": "stubborn"}
                elif op == "open":
                    out = {"id": msg["id"], "ok": True, "dims": [1, 2, 2]}
                elif op == "close":
                    out = {"id": msg["id"], "ok": True}
                    print(json.dumps(out), flush=True)
                    time.sleep(600)  # acknowledge but refuse to exit
                    continue
                else:
                    out = {"id": msg["id"], "ok": False, "error": "nope"}
                print(json.dumps(out), flush=True)
        """))
        wire = WireSession([sys.executable, str(script)], vol_path, {}, close_timeout=0.5)
        with pytest.raises(ProtocolError, match="killed"):
            wire.close()
