"""JSON artifacts: run configs, op graphs, arena plans, tile plans, schedules."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.app.domain.config import PRESETS, RunConfig, parse_run_config
from src.app.domain.errors import ConfigValidationError, ContainerIOError
from src.app.domain.planner.types import ArenaPlan, OpGraph, OpSpec, TensorDef
from src.app.domain.sched.types import TilePlan, TileSchedule

logger = logging.getLogger(__name__)


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, data: Any) -> None:
    path = Path(path)
    try:
        path.write_text(dumps(data), encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot write {path}: {exc}"
        raise ContainerIOError(msg) from exc
    logger.debug(f"Wrote {path}")


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot read {path}: {exc}"
        raise ContainerIOError(msg) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        msg = f"{path} is not valid JSON: {exc}"
        raise ContainerIOError(msg) from exc


def _deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_run_config(path: str | Path) -> RunConfig:
    """Read a run config; a ``preset`` key supplies defaults the rest overrides.

    Raises:
        ContainerIOError: If the file cannot be read or is not JSON.
        ConfigValidationError: If the config fails validation.
    """
    data = read_json(path)
    if not isinstance(data, dict):
        raise ConfigValidationError(f"{path}: run config must be a JSON object", fields=["<root>"])
    if "preset" in data:
        name = data.pop("preset")
        if name not in PRESETS:
            msg = f"Unknown preset '{name}'; choose from {sorted(PRESETS)}"
            raise ConfigValidationError(msg, fields=["preset"])
        data = _deep_merge(PRESETS[name](), data)
    return parse_run_config(data)


class _TensorDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    size: int = Field(gt=0)
    inplace_of: str | None = None


class _OpDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    inputs: list[str] = []
    outputs: list[_TensorDoc] = []


class _GraphDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ops: list[_OpDoc]
    outputs: list[str] = []


def graph_to_dict(g: OpGraph) -> dict[str, Any]:
    return {
        "ops": [
            {
                "name": op.name,
                "inputs": list(op.inputs),
                "outputs": [
                    {"id": t.tensor_id, "size": t.size_bytes}
                    | ({"inplace_of": t.inplace_of} if t.inplace_of else {})
                    for t in op.outputs
                ],
            }
            for op in g.ops
        ],
        "outputs": list(g.outputs),
    }


def graph_from_dict(data: Any) -> OpGraph:
    try:
        doc = _GraphDoc.model_validate(data)
    except ValidationError as exc:
        fields = [".".join(str(p) for p in err["loc"]) for err in exc.errors()]
        msg = f"Invalid op graph: {exc.errors()[0]['msg']} at {fields[0]}"
        raise ConfigValidationError(msg, fields=fields) from exc
    return OpGraph(
        ops=tuple(
            OpSpec(
                name=op.name,
                inputs=tuple(op.inputs),
                outputs=tuple(TensorDef(t.id, t.size, t.inplace_of) for t in op.outputs),
            )
            for op in doc.ops
        ),
        outputs=tuple(doc.outputs),
    )


def plan_to_dict(plan: ArenaPlan) -> dict[str, Any]:
    return {
        "alignment": plan.alignment,
        "arena_bytes": plan.arena_bytes,
        "offsets": dict(plan.offsets),
        "aliases": dict(plan.aliases),
    }


def plan_from_dict(data: dict[str, Any]) -> ArenaPlan:
    try:
        return ArenaPlan(
            offsets={str(k): int(v) for k, v in data["offsets"].items()},
            arena_bytes=int(data["arena_bytes"]),
            alignment=int(data.get("alignment", 4)),
            aliases={str(k): str(v) for k, v in data.get("aliases", {}).items()},
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        msg = f"Invalid arena plan: {exc}"
        raise ConfigValidationError(msg, fields=["offsets", "arena_bytes"]) from exc


def tile_plan_to_dict(plan: TilePlan) -> dict[str, Any]:
    return {
        "layers": [
            {
                "layer": t.layer,
                "workload": asdict(t.workload),
                "slab": asdict(t.slab),
                "tile": asdict(t.tile),
                "loop_order": t.loop_order,
                "slab_count": t.slab_count,
                "tiles_per_slab": t.tiles_per_slab,
            }
            for t in plan.layers
        ]
    }


def schedule_to_dict(schedule: TileSchedule) -> dict[str, Any]:
    return {
        "total_cycles": schedule.total_cycles,
        "estimated_energy_j": schedule.estimated_energy_j,
        "compute_cycles": schedule.compute_cycles,
        "transfer_cycles": schedule.transfer_cycles,
        "events": [asdict(e) for e in schedule.events],
    }


__all__ = [
    "dumps",
    "graph_from_dict",
    "graph_to_dict",
    "load_run_config",
    "plan_from_dict",
    "plan_to_dict",
    "read_json",
    "schedule_to_dict",
    "tile_plan_to_dict",
    "write_json",
]
