from .plan import ALL_STRATEGIES, PropagationPlan, Strategy, build_plan
from .runner import (
    GUIDANCE_DEAD,
    GUIDANCE_PREVIOUS,
    PropagationTrace,
    TraceEntry,
    run_interactive,
    run_propagation,
)

__all__ = [
    "ALL_STRATEGIES",
    "GUIDANCE_DEAD",
    "GUIDANCE_PREVIOUS",
    "PropagationPlan",
    "PropagationTrace",
    "Strategy",
    "TraceEntry",
    "build_plan",
    "run_interactive",
    "run_propagation",
]
