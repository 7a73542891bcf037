"""Independent checks of a simulated schedule."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable

from src.app.domain.sched.types import HEAD_LAYER, MemoryHierarchy, TileEvent, TilePlan, TileSchedule


def _exclusivity(events: Iterable[TileEvent]) -> list[str]:
    by_resource: dict[str, list[TileEvent]] = defaultdict(list)
    for event in events:
        by_resource[event.resource].append(event)
    problems = []
    for resource, items in sorted(by_resource.items()):
        items.sort(key=lambda e: (e.start, e.end))
        for prev, cur in zip(items, items[1:], strict=False):
            if cur.start < prev.end:
                problems.append(
                    f"{resource}: {cur.layer}#{cur.slab} starts at {cur.start} "
                    f"before {prev.layer}#{prev.slab} ends at {prev.end}"
                )
    return problems


def _dependencies(events: list[TileEvent]) -> list[str]:
    slab_ready = {
        (e.layer, e.slab): e.end for e in events if e.resource == "dma_l3_l2"
    }
    tile_ready = {
        (e.layer, e.slab, e.tile): e.end for e in events if e.resource == "dma_l2_l1"
    }
    problems = []
    for e in events:
        if e.resource == "dma_l3_l2" or e.layer == HEAD_LAYER:
            continue
        ready = slab_ready.get((e.layer, e.slab))
        if ready is None:
            problems.append(f"{e.layer}#{e.slab} has tile work but no slab transfer")
        elif e.start < ready:
            problems.append(f"{e.layer}#{e.slab} tile {e.tile} starts at {e.start} before slab arrives at {ready}")
        if e.resource == "cluster":
            tile = tile_ready.get((e.layer, e.slab, e.tile))
            if tile is None or e.start < tile:
                problems.append(f"{e.layer}#{e.slab} tile {e.tile} computes before its operands arrive")
    return problems


def _head_after_blocks(events: list[TileEvent]) -> list[str]:
    """The head phase needs no transfers but must follow every block tile."""
    blocks_done = max(
        (e.end for e in events if e.resource == "cluster" and e.layer != HEAD_LAYER), default=0
    )
    return [
        f"head starts at {e.start} before the last block ends at {blocks_done}"
        for e in events
        if e.layer == HEAD_LAYER and e.start < blocks_done
    ]


def _peak_occupancy(intervals: list[tuple[int, int, int]]) -> int:
    """Largest total size over half-open [start, end) intervals."""
    points = sorted(
        [(start, size) for start, _, size in intervals] + [(end, -size) for _, end, size in intervals]
    )
    peak = current = 0
    for _, delta in points:
        current += delta
        peak = max(peak, current)
    return peak


def _buffers(events: list[TileEvent]) -> tuple[list[tuple[int, int, int]], list[tuple[int, int, int]]]:
    """L2 buffers live from slab transfer to last tile compute; L1 per tile."""
    slab_end: dict[tuple[str, int], int] = {}
    tile_end: dict[tuple[str, int, int | None], int] = {}
    for e in events:
        if e.resource == "cluster":
            key = (e.layer, e.slab)
            slab_end[key] = max(slab_end.get(key, e.end), e.end)
            tile_end[(e.layer, e.slab, e.tile)] = e.end
    l2 = [
        (e.start, slab_end.get((e.layer, e.slab), e.end), e.buffer_bytes)
        for e in events
        if e.resource == "dma_l3_l2"
    ]
    l1 = [
        (e.start, tile_end.get((e.layer, e.slab, e.tile), e.end), e.buffer_bytes)
        for e in events
        if e.resource == "dma_l2_l1"
    ]
    return l2, l1


def audit_schedule(schedule: TileSchedule, plan: TilePlan, hier: MemoryHierarchy) -> list[str]:
    """Resource exclusivity, data dependency, and capacity problems; empty when clean."""
    events = list(schedule.events)
    problems = _exclusivity(events) + _dependencies(events) + _head_after_blocks(events)

    for t in plan.layers:
        if 2 * t.slab.working_set > hier.l2_bytes:
            problems.append(f"{t.layer}: double-buffered slab exceeds L2")
        if 2 * t.tile.working_set > hier.l1_bytes:
            problems.append(f"{t.layer}: double-buffered tile exceeds L1")

    l2, l1 = _buffers(events)
    if (peak := _peak_occupancy(l2)) > hier.l2_bytes:
        problems.append(f"L2 occupancy peaks at {peak} bytes, capacity {hier.l2_bytes}")
    if (peak := _peak_occupancy(l1)) > hier.l1_bytes:
        problems.append(f"L1 occupancy peaks at {peak} bytes, capacity {hier.l1_bytes}")

    if schedule.total_cycles < max(schedule.compute_cycles, schedule.transfer_cycles):
        problems.append("total cycles below the compute/transfer lower bound")
    return problems


__all__ = ["audit_schedule"]
