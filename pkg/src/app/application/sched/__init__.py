"""Tiling and double-buffered schedule simulation, plus MAC accounting."""

from src.app.application.sched.audit import audit_schedule
from src.app.application.sched.macs import count_macs, gemm_workloads, mac_table
from src.app.application.sched.report import report_deployment, summarize_schedule
from src.app.application.sched.simulator import simulate
from src.app.application.sched.tiling import plan_tiles

__all__ = [
    "audit_schedule",
    "count_macs",
    "gemm_workloads",
    "mac_table",
    "plan_tiles",
    "report_deployment",
    "simulate",
    "summarize_schedule",
]
