"""Scheduler domain types: memory hierarchy, tiling plans, schedules, MAC tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Measured on-device figures, printed as reference only.
REFERENCE_LATENCY_S = 12.2
REFERENCE_ENERGY_J = 0.44
REFERENCE_POWER_W = 0.03645

Resource = Literal["dma_l3_l2", "dma_l2_l1", "cluster"]
EventKind = Literal["transfer", "compute"]

# Patch projection and classifier run once per inference after the last block,
# on operands already resident in L1.
HEAD_LAYER = "head"


class MemoryHierarchy(BaseModel):
    """External, shared, and local memory plus the compute cluster.

    All hardware numbers are model parameters, not measurements.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    l3_bytes: int = Field(default=1 << 40, gt=0)
    l2_bytes: int = Field(default=1_572_864, gt=0)
    l1_bytes: int = Field(default=131_072, gt=0)
    bw_l3_l2: float = Field(default=1.0, gt=0, description="bytes per cycle")
    bw_l2_l1: float = Field(default=8.0, gt=0, description="bytes per cycle")
    worker_cores: int = Field(default=8, ge=1)
    macs_per_core_cycle: float = Field(default=8.0, gt=0)
    clock_hz: float = Field(default=370e6, gt=0)
    avg_power_w: float = Field(default=REFERENCE_POWER_W, gt=0)

    @model_validator(mode="after")
    def _check_levels(self) -> MemoryHierarchy:
        if not self.l1_bytes < self.l2_bytes < self.l3_bytes:
            msg = (
                f"expected l1 < l2 < l3, got {self.l1_bytes}, "
                f"{self.l2_bytes}, {self.l3_bytes}"
            )
            raise ValueError(msg)
        return self

    @property
    def macs_per_cycle(self) -> float:
        return self.worker_cores * self.macs_per_core_cycle


@dataclass(frozen=True)
class GemmWorkload:
    """A batched int8 GEMM: batch x ([M, K] @ [K, N])."""

    name: str
    m: int
    k: int
    n: int
    batch: int = 1
    out_bytes: int = 1

    @property
    def macs(self) -> int:
        return self.batch * self.m * self.k * self.n


@dataclass(frozen=True)
class Blocking:
    """An output block of rows x cols with its K-long operand stripes."""

    rows: int
    cols: int
    k: int
    out_bytes: int = 1

    @property
    def operand_bytes(self) -> int:
        return self.rows * self.k + self.k * self.cols

    @property
    def working_set(self) -> int:
        return self.operand_bytes + self.rows * self.cols * self.out_bytes


@dataclass(frozen=True)
class LayerTiling:
    """Slab (L3 -> L2) and tile (L2 -> L1) blocking of one workload.

    Loop order is output-stationary: slabs row-major over the output, tiles
    row-major within a slab.
    """

    layer: str
    workload: GemmWorkload
    slab: Blocking
    tile: Blocking
    loop_order: str = "output_stationary"

    @property
    def slabs_per_batch(self) -> int:
        w = self.workload
        return -(-w.m // self.slab.rows) * -(-w.n // self.slab.cols)

    @property
    def slab_count(self) -> int:
        return self.workload.batch * self.slabs_per_batch

    @property
    def tiles_per_slab(self) -> int:
        return -(-self.slab.rows // self.tile.rows) * -(-self.slab.cols // self.tile.cols)

    @property
    def tile_count(self) -> int:
        return self.slab_count * self.tiles_per_slab


@dataclass(frozen=True)
class TilePlan:
    layers: tuple[LayerTiling, ...]


@dataclass(frozen=True)
class TileEvent:
    """One transfer or compute phase on a resource, in cycles [start, end)."""

    kind: EventKind
    resource: Resource
    layer: str
    slab: int
    start: int
    end: int
    tile: int | None = None
    bytes: int = 0
    macs: int = 0
    buffer_bytes: int = 0


@dataclass(frozen=True)
class TileSchedule:
    events: tuple[TileEvent, ...]
    total_cycles: int
    estimated_energy_j: float
    compute_cycles: int
    transfer_cycles: int


@dataclass(frozen=True)
class MacBreakdown:
    """Per-block MACs by component, plus whole-model totals."""

    components: dict[str, int]
    layers: int
    head_macs: int = 0

    @property
    def block_total(self) -> int:
        return sum(self.components.values())

    @property
    def model_total(self) -> int:
        return self.layers * self.block_total + self.head_macs

    @property
    def model_flops(self) -> int:
        return 2 * self.model_total

    def share(self, component: str) -> float:
        total = self.block_total
        return self.components[component] / total if total else 0.0


@dataclass(frozen=True)
class DeploymentReport:
    total_cycles: int
    seconds: float
    energy_j: float
    macs: int
    flops: int
    slabs: int
    tiles: int
    reference: dict[str, float] = field(
        default_factory=lambda: {
            "latency_s": REFERENCE_LATENCY_S,
            "energy_j": REFERENCE_ENERGY_J,
            "power_w": REFERENCE_POWER_W,
        }
    )


__all__ = [
    "HEAD_LAYER",
    "REFERENCE_ENERGY_J",
    "REFERENCE_LATENCY_S",
    "REFERENCE_POWER_W",
    "Blocking",
    "DeploymentReport",
    "EventKind",
    "GemmWorkload",
    "LayerTiling",
    "MacBreakdown",
    "MemoryHierarchy",
    "Resource",
    "TileEvent",
    "TilePlan",
    "TileSchedule",
]
