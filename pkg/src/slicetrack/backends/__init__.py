from .base import (
    BackendError,
    BackendInfo,
    BackendRegistry,
    ParamSpec,
    PreviousMask,
    Session,
    SessionConfig,
    StepRequest,
    StepResult,
    VolumeResolver,
    default_registry,
    guidance_step_index,
    open_session,
)
from .gt_oracle import GtOracleSession, corrupt_slice, flip_field, gt_oracle_backend
from .threshold_oracle import ThresholdOracleSession, threshold_oracle_backend
from .wire import PROTOCOL, ProtocolError, WireSession, wire_backend

__all__ = [
    "PROTOCOL",
    "BackendError",
    "BackendInfo",
    "BackendRegistry",
    "GtOracleSession",
    "ParamSpec",
    "PreviousMask",
    "ProtocolError",
    "Session",
    "SessionConfig",
    "StepRequest",
    "StepResult",
    "ThresholdOracleSession",
    "VolumeResolver",
    "WireSession",
    "corrupt_slice",
    "default_registry",
    "flip_field",
    "guidance_step_index",
    "gt_oracle_backend",
    "open_session",
    "threshold_oracle_backend",
    "wire_backend",
]
