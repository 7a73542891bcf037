"""Slab (L3 -> L2) and tile (L2 -> L1) blocking under double buffering."""

from __future__ import annotations

import logging

from src.app.application.sched.macs import gemm_workloads
from src.app.domain.errors import InfeasiblePlanError
from src.app.domain.model.config import ModelConfig
from src.app.domain.sched.types import Blocking, GemmWorkload, LayerTiling, MemoryHierarchy, TilePlan

logger = logging.getLogger(__name__)


def divisors(value: int) -> list[int]:
    return [d for d in range(1, value + 1) if value % d == 0]


def largest_blocking(
    rows: int, cols: int, k: int, out_bytes: int, capacity: int, layer: str, level: str
) -> Blocking:
    """Largest rows x cols block (rows | ``rows``, cols | ``cols``) with 2 x working set <= capacity.

    Ties on area prefer more columns, then more rows.

    Raises:
        InfeasiblePlanError: If even a single output with its K-long operand
            stripes does not fit twice.
    """
    unit = Blocking(1, 1, k, out_bytes)
    if 2 * unit.working_set > capacity:
        msg = (
            f"Layer '{layer}': a 1x1 output with K={k} needs {2 * unit.working_set} bytes "
            f"double-buffered, {level} holds {capacity}"
        )
        raise InfeasiblePlanError(msg, layer=layer)

    best = unit
    for r in divisors(rows):
        for c in divisors(cols):
            candidate = Blocking(r, c, k, out_bytes)
            if 2 * candidate.working_set > capacity:
                continue
            if (r * c, c, r) > (best.rows * best.cols, best.cols, best.rows):
                best = candidate
    return best


def tile_layer(workload: GemmWorkload, hier: MemoryHierarchy) -> LayerTiling:
    slab = largest_blocking(
        workload.m, workload.n, workload.k, workload.out_bytes, hier.l2_bytes, workload.name, "L2"
    )
    tile = largest_blocking(
        slab.rows, slab.cols, workload.k, workload.out_bytes, hier.l1_bytes, workload.name, "L1"
    )
    return LayerTiling(layer=workload.name, workload=workload, slab=slab, tile=tile)


def plan_tiles(cfg: ModelConfig, hier: MemoryHierarchy) -> TilePlan:
    """Blocking for each GEMM of one block; every block reuses it.

    Raises:
        InfeasiblePlanError: Naming the first layer whose indivisible tile
            exceeds half a memory level.
    """
    layers = tuple(tile_layer(w, hier) for w in gemm_workloads(cfg))
    for t in layers:
        logger.debug(
            f"{t.layer}: slab {t.slab.rows}x{t.slab.cols} ({t.slab_count} slabs), "
            f"tile {t.tile.rows}x{t.tile.cols} ({t.tiles_per_slab} per slab)"
        )
    return TilePlan(layers=layers)


__all__ = ["divisors", "largest_blocking", "plan_tiles", "tile_layer"]
