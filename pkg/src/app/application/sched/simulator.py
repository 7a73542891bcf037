"""Double-buffered slab/tile pipeline simulation.

Every slab of every layer joins one global pipeline on the L3 -> L2 DMA: the
transfer of slab n+1 starts together with the compute of slab n, and compute
of a slab waits for its own transfer and for the previous slab. Inside a slab
the same rule runs tile by tile on the L2 -> L1 DMA and the cluster.
"""

from __future__ import annotations

import logging
import math

from src.app.domain.sched.types import (
    HEAD_LAYER,
    LayerTiling,
    MacBreakdown,
    MemoryHierarchy,
    TileEvent,
    TilePlan,
    TileSchedule,
)

logger = logging.getLogger(__name__)


def transfer_cycles(nbytes: int, bandwidth: float) -> int:
    return math.ceil(nbytes / bandwidth)


def compute_cycles(macs: int, macs_per_cycle: float) -> int:
    return math.ceil(macs / macs_per_cycle)


def _run_tiles(
    events: list[TileEvent],
    layer: str,
    slab: int,
    tiling: LayerTiling,
    hier: MemoryHierarchy,
    start: int,
) -> tuple[int, int]:
    """Tile pipeline of one slab from ``start``; returns (end, compute cycles)."""
    tile = tiling.tile
    tile_macs = tile.rows * tile.cols * tile.k
    move = transfer_cycles(tile.operand_bytes, hier.bw_l2_l1)
    work = compute_cycles(tile_macs, hier.macs_per_cycle)

    next_transfer = start
    compute_end = start
    for index in range(tiling.tiles_per_slab):
        transfer_start = next_transfer
        transfer_end = transfer_start + move
        compute_start = max(transfer_end, compute_end)
        compute_end = compute_start + work
        next_transfer = compute_start
        events.append(
            TileEvent(
                kind="transfer",
                resource="dma_l2_l1",
                layer=layer,
                slab=slab,
                tile=index,
                start=transfer_start,
                end=transfer_end,
                bytes=tile.operand_bytes,
                buffer_bytes=tile.working_set,
            )
        )
        events.append(
            TileEvent(
                kind="compute",
                resource="cluster",
                layer=layer,
                slab=slab,
                tile=index,
                start=compute_start,
                end=compute_end,
                macs=tile_macs,
            )
        )
    return compute_end, work * tiling.tiles_per_slab


def simulate(plan: TilePlan, hier: MemoryHierarchy, macs: MacBreakdown) -> TileSchedule:
    """Cycle-level schedule of ``macs.layers`` blocks, each running ``plan``.

    A non-zero ``macs.head_macs`` adds one compute phase after the last block,
    so the cycle count covers every MAC the report counts. Energy is total time at ``clock_hz`` times the configured average power.
    """
    events: list[TileEvent] = []
    next_transfer = 0
    compute_end = 0
    total_compute = 0
    total_transfer = 0

    for block in range(macs.layers):
        for tiling in plan.layers:
            layer = f"blocks.{block}.{tiling.layer}"
            move = transfer_cycles(tiling.slab.operand_bytes, hier.bw_l3_l2)
            for slab in range(tiling.slab_count):
                transfer_start = next_transfer
                transfer_end = transfer_start + move
                events.append(
                    TileEvent(
                        kind="transfer",
                        resource="dma_l3_l2",
                        layer=layer,
                        slab=slab,
                        start=transfer_start,
                        end=transfer_end,
                        bytes=tiling.slab.operand_bytes,
                        buffer_bytes=tiling.slab.working_set,
                    )
                )
                compute_start = max(transfer_end, compute_end)
                compute_end, work = _run_tiles(events, layer, slab, tiling, hier, compute_start)
                next_transfer = compute_start
                total_compute += work
                total_transfer += move

    if macs.head_macs > 0:
        work = compute_cycles(macs.head_macs, hier.macs_per_cycle)
        events.append(
            TileEvent(
                kind="compute",
                resource="cluster",
                layer=HEAD_LAYER,
                slab=0,
                tile=0,
                start=compute_end,
                end=compute_end + work,
                macs=macs.head_macs,
            )
        )
        compute_end += work
        total_compute += work

    total = compute_end
    energy = total / hier.clock_hz * hier.avg_power_w
    logger.info(
        f"⏱️ Simulated {macs.layers} blocks: {total} cycles "
        f"({total / hier.clock_hz:.3f} s, {energy:.4f} J)"
    )
    return TileSchedule(
        events=tuple(events),
        total_cycles=total,
        estimated_energy_j=energy,
        compute_cycles=total_compute,
        transfer_cycles=total_transfer,
    )


__all__ = ["compute_cycles", "simulate", "transfer_cycles"]
