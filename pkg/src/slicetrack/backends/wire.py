"""Client for out-of-process segmenter adapters speaking protocol "vp/1".

Framing is newline-delimited JSON over the child's stdin/stdout; every
request carries an "id" echoed by the response. Masks travel as RLE JSON
objects. Adapters keep diagnostics on stderr; stdout is protocol-only.
"""

from __future__ import annotations

import json
import subprocess
import threading
import time

from ..core import BoxPrompt, MaskPrompt, rle_from_json, rle_to_json
from .base import (
    BackendError,
    BackendInfo,
    PreviousMask,
    SessionConfig,
    StepRequest,
    StepResult,
    VolumeResolver,
)

PROTOCOL = "vp/1"


class ProtocolError(BackendError):
    pass


def guidance_to_wire(guidance) -> dict:
    if isinstance(guidance, BoxPrompt):
        box = guidance.box
        return {
            "kind": "box",
            "x_min": box.x_min,
            "y_min": box.y_min,
            "x_max": box.x_max,
            "y_max": box.y_max,
        }
    if isinstance(guidance, MaskPrompt):
        return {"kind": "mask", "rle": rle_to_json(guidance.mask), "step_index": 0}
    assert isinstance(guidance, PreviousMask)
    return {"kind": "mask", "rle": rle_to_json(guidance.mask), "step_index": guidance.step_index}


class WireSession:
    """One child process, one open volume, serialized request/response."""

    def __init__(
        self,
        argv: list[str],
        volume_path: str,
        params: dict,
        close_timeout: float = 10.0,
    ):
        self._closed = False
        self._close_timeout = close_timeout
        self._lock = threading.Lock()
        self._next_id = 0
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,
                text=True,
            )
        except OSError as exc:
            raise BackendError(f"failed to launch adapter {argv!r}: {exc}") from exc
        try:
            hello = self._call({"op": "hello"})
            if hello.get("protocol") != PROTOCOL:
                raise ProtocolError(f"adapter speaks {hello.get('protocol')!r}, expected {PROTOCOL!r}")
            self.backend_name = hello.get("backend", "")
            opened = self._call({"op": "open", "volume_path": volume_path, "params": params})
            dims = opened.get("dims")
            if not (isinstance(dims, list) and len(dims) == 3):
                raise ProtocolError(f"open response missing dims: {opened}")
            self._dims = tuple(int(v) for v in dims)
        except BaseException:
            self._proc.kill()
            self._proc.wait()
            raise

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._dims

    def _call(self, payload: dict) -> dict:
        with self._lock:
            self._next_id += 1
            msg_id = self._next_id
            line = json.dumps({"id": msg_id, **payload}, separators=(",", ":"))
            try:
                self._proc.stdin.write(line + "\n")
                self._proc.stdin.flush()
                response = self._proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise ProtocolError(f"adapter pipe failed: {exc}") from exc
        if not response:
            raise ProtocolError("adapter closed its stdout")
        try:
            reply = json.loads(response)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"non-JSON reply {response!r}") from exc
        if reply.get("id") != msg_id:
            raise ProtocolError(f"reply id {reply.get('id')} does not match request {msg_id}")
        if not reply.get("ok"):
            raise ProtocolError(str(reply.get("error", "adapter error")))
        return reply

    def step(self, req: StepRequest) -> StepResult:
        if self._closed:
            raise BackendError("closed")
        start = time.perf_counter()
        reply = self._call({"op": "step", "z": req.z, "guidance": guidance_to_wire(req.guidance)})
        mask = rle_from_json(reply["rle"])
        if mask.dims != self._dims[1:]:
            raise ProtocolError(f"mask dims {mask.dims} do not match volume slices {self._dims[1:]}")
        return StepResult(req.z, mask, (time.perf_counter() - start) * 1000.0)

    def close(self) -> None:
        if self._closed:
            raise BackendError("closed")
        self._closed = True
        try:
            self._call({"op": "close"})
        finally:
            try:
                self._proc.wait(timeout=self._close_timeout)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
                raise ProtocolError(f"adapter did not exit within {self._close_timeout}s; killed")


def wire_backend(backend_id: str, argv: list[str]) -> BackendInfo:
    """Register an external adapter command as a backend.

    Params are passed through to the adapter's open message unvalidated;
    their schema belongs to the adapter.
    """

    def factory(cfg: SessionConfig, resolver: VolumeResolver) -> WireSession:
        return WireSession(argv, resolver.path_for(cfg.volume_ref), dict(cfg.params))

    return BackendInfo(backend_id=backend_id, params_schema={}, factory=factory)
