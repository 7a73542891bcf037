"""End-to-end deployment estimate."""

from __future__ import annotations

import logging

from src.app.application.sched.macs import count_macs
from src.app.application.sched.simulator import simulate
from src.app.application.sched.tiling import plan_tiles
from src.app.domain.model.config import ModelConfig
from src.app.domain.sched.types import (
    DeploymentReport,
    MacBreakdown,
    MemoryHierarchy,
    TilePlan,
    TileSchedule,
)

logger = logging.getLogger(__name__)


def summarize_schedule(
    plan: TilePlan, macs: MacBreakdown, schedule: TileSchedule, hier: MemoryHierarchy
) -> DeploymentReport:
    seconds = schedule.total_cycles / hier.clock_hz
    return DeploymentReport(
        total_cycles=schedule.total_cycles,
        seconds=seconds,
        energy_j=seconds * hier.avg_power_w,
        macs=macs.model_total,
        flops=macs.model_flops,
        slabs=macs.layers * sum(t.slab_count for t in plan.layers),
        tiles=macs.layers * sum(t.tile_count for t in plan.layers),
    )


def report_deployment(
    cfg: ModelConfig, hier: MemoryHierarchy, num_classes: int | None = None
) -> DeploymentReport:
    """Plan, simulate, and summarize one inference.

    The cost model is not calibrated to hardware; the measured on-device
    figures ride along in ``reference`` for comparison only.
    """
    plan = plan_tiles(cfg, hier)
    macs = count_macs(cfg, num_classes)
    report = summarize_schedule(plan, macs, simulate(plan, hier, macs), hier)
    logger.info(f"📦 Deployment estimate: {report.seconds:.3f} s, {report.energy_j:.4f} J")
    return report


__all__ = ["report_deployment", "summarize_schedule"]
