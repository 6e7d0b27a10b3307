"""Reference vp/1 adapter: gt-oracle semantics over stdio.

Run with `python -m slicetrack.backends.reference_adapter`. Doubles as the
protocol conformance fixture and as a template for writing real adapters.
Only protocol JSON goes to stdout; anything else belongs on stderr.
"""

from __future__ import annotations

import json
import sys

from ..core import BoundingBox2D, BoxPrompt, MaskPrompt, rle_from_json, rle_to_json
from ..ingest import load_nifti
from .base import PreviousMask, StepRequest
from .gt_oracle import GtOracleSession

BACKEND_NAME = "reference-gt"


def _guidance_from_wire(obj: dict):
    kind = obj.get("kind")
    if kind == "box":
        box = BoundingBox2D(
            x_min=int(obj["x_min"]),
            y_min=int(obj["y_min"]),
            x_max=int(obj["x_max"]),
            y_max=int(obj["y_max"]),
            z=int(obj.get("z", 0)),
        )
        return BoxPrompt(box)
    if kind == "mask":
        mask = rle_from_json(obj["rle"])
        step_index = int(obj.get("step_index", 0))
        if step_index == 0:
            return MaskPrompt(z=int(obj.get("z", 0)), mask=mask)
        return PreviousMask(mask=mask, step_index=step_index)
    raise ValueError(f"unknown guidance kind {kind!r}")


def handle_message(msg: dict, state: dict) -> tuple[dict, bool]:
    """Returns (reply, keep_running)."""
    msg_id = msg.get("id")
    op = msg.get("op")
    try:
        if op == "hello":
            return {"id": msg_id, "ok": True, "protocol": "vp/1", "backend": BACKEND_NAME}, True
        if op == "open":
            params = msg.get("params", {})
            volume = load_nifti(msg["volume_path"])
            gt = load_nifti(params["gt_path"], mask=True)
            state["session"] = GtOracleSession(
                volume.dims,
                gt,
                {
                    "drift": float(params.get("drift", 0.0)),
                    "flip_prob": float(params.get("flip_prob", 0.0)),
                    "seed": int(params.get("seed", 0)),
                },
            )
            return {"id": msg_id, "ok": True, "dims": list(volume.dims)}, True
        if op == "step":
            session = state.get("session")
            if session is None:
                raise RuntimeError("step before open")
            z = int(msg["z"])
            guidance = _guidance_from_wire({**msg["guidance"], "z": z})
            result = session.step(StepRequest(z=z, guidance=guidance))
            return {"id": msg_id, "ok": True, "z": z, "rle": rle_to_json(result.mask)}, True
        if op == "close":
            if state.get("session") is not None:
                state["session"].close()
            return {"id": msg_id, "ok": True}, False
        raise ValueError(f"unknown op {op!r}")
    except Exception as exc:
        return {"id": msg_id, "ok": False, "error": str(exc)}, True


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    state: dict = {}
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            reply, running = {"id": None, "ok": False, "error": f"bad JSON: {exc}"}, True
        else:
            reply, running = handle_message(msg, state)
        stdout.write(json.dumps(reply, separators=(",", ":")) + "\n")
        stdout.flush()
        if not running:
            break


if __name__ == "__main__":
    serve()
