"""Planner domain types: op graphs, tensor lifetimes, arena plans."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TensorDef:
    """A tensor produced by an op."""

    tensor_id: str
    size_bytes: int
    inplace_of: str | None = None


@dataclass(frozen=True)
class OpSpec:
    """One op in execution order."""

    name: str
    inputs: tuple[str, ...]
    outputs: tuple[TensorDef, ...]


@dataclass(frozen=True)
class OpGraph:
    """Topologically ordered ops.

    Attributes:
        ops: Ops in execution order.
        outputs: Graph outputs; they live until the final op. When empty, every
            tensor without a consumer counts as a graph output.
    """

    ops: tuple[OpSpec, ...]
    outputs: tuple[str, ...] = ()


@dataclass(frozen=True)
class TensorLifetime:
    """Inclusive [def_step, last_use_step] interval of a tensor.

    ``members`` lists the tensor ids sharing this interval when in-place
    outputs are merged into their input; it is just ``(tensor_id,)`` otherwise.
    """

    tensor_id: str
    size_bytes: int
    def_step: int
    last_use_step: int
    members: tuple[str, ...] = ()

    def overlaps(self, other: TensorLifetime) -> bool:
        return self.def_step <= other.last_use_step and other.def_step <= self.last_use_step


@dataclass(frozen=True)
class ArenaPlan:
    """Static offsets into one arena."""

    offsets: dict[str, int]
    arena_bytes: int
    alignment: int = 4
    aliases: dict[str, str] = field(default_factory=dict)

    def offset_of(self, tensor_id: str) -> int:
        return self.offsets[self.aliases.get(tensor_id, tensor_id)]


@dataclass(frozen=True)
class PlanViolation:
    """Two lifetime-overlapping tensors whose byte ranges intersect."""

    first: str
    second: str
    error: str


__all__ = [
    "ArenaPlan",
    "OpGraph",
    "OpSpec",
    "PlanViolation",
    "TensorDef",
    "TensorLifetime",
]
