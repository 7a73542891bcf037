"""Chrome trace-event export of a tile schedule."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from src.app.domain.sched.types import TileSchedule
from src.app.infrastructure.storage.json_codec import write_json

PROCESS_NAME = "tinymyo"
# one trace thread per resource, in pipeline order
RESOURCE_TIDS = {"dma_l3_l2": 1, "dma_l2_l1": 2, "cluster": 3}


def to_chrome_trace(schedule: TileSchedule, clock_hz: float) -> dict[str, Any]:
    """Complete ("X") events in microseconds, one thread per resource."""
    us_per_cycle = 1e6 / clock_hz
    events: list[dict[str, Any]] = [
        {"name": "process_name", "ph": "M", "pid": 0, "tid": 0, "args": {"name": PROCESS_NAME}}
    ]
    events += [
        {"name": "thread_name", "ph": "M", "pid": 0, "tid": tid, "args": {"name": resource}}
        for resource, tid in RESOURCE_TIDS.items()
    ]
    for e in schedule.events:
        label = f"{e.layer}#{e.slab}" if e.tile is None else f"{e.layer}#{e.slab}.{e.tile}"
        events.append(
            {
                "name": label,
                "cat": e.kind,
                "ph": "X",
                "pid": 0,
                "tid": RESOURCE_TIDS[e.resource],
                "ts": e.start * us_per_cycle,
                "dur": (e.end - e.start) * us_per_cycle,
                "args": {"bytes": e.bytes, "macs": e.macs, "cycles": e.end - e.start},
            }
        )
    return {"traceEvents": events, "displayTimeUnit": "ns"}


def write_chrome_trace(path: str | Path, schedule: TileSchedule, clock_hz: float) -> None:
    write_json(path, to_chrome_trace(schedule, clock_hz))


__all__ = ["to_chrome_trace", "write_chrome_trace"]
