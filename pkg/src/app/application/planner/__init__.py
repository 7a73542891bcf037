"""Liveness analysis and static arena planning."""

from src.app.application.planner.arena import align_up, plan_arena, unshared_bytes
from src.app.application.planner.graph_builder import build_inference_graph
from src.app.application.planner.liveness import compute_liveness, liveness_lower_bound
from src.app.application.planner.verify import verify_plan

__all__ = [
    "align_up",
    "build_inference_graph",
    "compute_liveness",
    "liveness_lower_bound",
    "plan_arena",
    "unshared_bytes",
    "verify_plan",
]
