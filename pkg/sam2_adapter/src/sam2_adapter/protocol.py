"""vp/1 message loop: newline-delimited JSON on stdin/stdout.

ops: hello -> open {volume_path, params} -> step {z, guidance}* -> close.
Box guidance and mask guidance with step_index 0 seed the tracker; later
mask guidance (the caller's previous-mask chain) maps to propagation from
the tracker's own memory. Only protocol JSON is written to stdout;
diagnostics belong on stderr.
"""

from __future__ import annotations

import json
import sys
from typing import Callable

import numpy as np

from . import rle
from .frames import volume_to_frames
from .nifti import load_volume

PROTOCOL = "vp/1"
BACKEND_NAME = "sam2"


def default_tracker_factory(params: dict):
    from .model import Sam2Tracker

    return Sam2Tracker(params)


class AdapterState:
    def __init__(self, tracker_factory: Callable[[dict], object]):
        self.tracker_factory = tracker_factory
        self.tracker = None
        self.dims: tuple[int, int, int] | None = None

    def handle(self, msg: dict) -> tuple[dict, bool]:
        msg_id = msg.get("id")
        op = msg.get("op")
        try:
            if op == "hello":
                return {
                    "id": msg_id, "ok": True, "protocol": PROTOCOL, "backend": BACKEND_NAME,
                }, True
            if op == "open":
                if self.tracker is not None:
                    raise RuntimeError("session already open")
                voxels = load_volume(msg["volume_path"])
                self.dims = voxels.shape
                tracker = self.tracker_factory(msg.get("params", {}))
                tracker.open(volume_to_frames(voxels))
                self.tracker = tracker
                return {"id": msg_id, "ok": True, "dims": list(self.dims)}, True
            if op == "step":
                if self.tracker is None:
                    raise RuntimeError("step before open")
                mask = self._step(int(msg["z"]), msg["guidance"])
                if mask.shape != self.dims[1:]:
                    raise RuntimeError(f"model mask shape {mask.shape} != {self.dims[1:]}")
                return {"id": msg_id, "ok": True, "z": int(msg["z"]),
                        "rle": rle.to_json(mask)}, True
            if op == "close":
                if self.tracker is not None:
                    self.tracker.close()
                    self.tracker = None
                return {"id": msg_id, "ok": True}, False
            raise ValueError(f"unknown op {op!r}")
        except Exception as exc:
            return {"id": msg_id, "ok": False, "error": str(exc)}, True

    def _step(self, z: int, guidance: dict) -> np.ndarray:
        if not 0 <= z < self.dims[0]:
            raise ValueError(f"slice index {z} outside [0, {self.dims[0]})")
        kind = guidance.get("kind")
        if kind == "box":
            box = (
                int(guidance["x_min"]), int(guidance["y_min"]),
                int(guidance["x_max"]), int(guidance["y_max"]),
            )
            if not (0 <= box[0] < box[2] <= self.dims[2] and 0 <= box[1] < box[3] <= self.dims[1]):
                raise ValueError(f"box {box} outside slice dims {self.dims[1:]}")
            return self.tracker.seed_box(z, box)
        if kind == "mask":
            mask = rle.from_json(guidance["rle"])
            if mask.shape != self.dims[1:]:
                raise ValueError(f"mask dims {mask.shape} do not match slices {self.dims[1:]}")
            if int(guidance.get("step_index", 0)) == 0:
                return self.tracker.seed_mask(z, mask)
            return self.tracker.predict(z)
        raise ValueError(f"unknown guidance kind {kind!r}")


def serve(stdin=None, stdout=None, tracker_factory: Callable[[dict], object] | None = None):
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    state = AdapterState(tracker_factory or default_tracker_factory)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            reply, running = {"id": None, "ok": False, "error": f"bad JSON: {exc}"}, True
        else:
            reply, running = state.handle(msg)
        stdout.write(json.dumps(reply, separators=(",", ":")) + "\n")
        stdout.flush()
        if not running:
            break
