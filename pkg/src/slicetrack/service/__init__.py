from .app import ApiError, create_app
from .jobs import INTERACTIVE, Job, JobError, JobManager
from .store import StoreError, VolumeStore

__all__ = [
    "ApiError",
    "INTERACTIVE",
    "Job",
    "JobError",
    "JobManager",
    "StoreError",
    "VolumeStore",
    "create_app",
]
