"""Greedy size-descending first-fit arena allocation."""

from __future__ import annotations

import logging

from src.app.domain.errors import InvalidArgumentError
from src.app.domain.planner.types import ArenaPlan, TensorLifetime

logger = logging.getLogger(__name__)


def align_up(value: int, alignment: int) -> int:
    return (value + alignment - 1) & ~(alignment - 1)


def unshared_bytes(lifetimes: list[TensorLifetime], alignment: int = 4) -> int:
    """Arena size with every tensor at its own aligned offset, nothing reused."""
    return sum(align_up(lt.size_bytes, alignment) for lt in lifetimes)


def plan_arena(lifetimes: list[TensorLifetime], alignment: int = 4) -> ArenaPlan:
    """Assign static offsets so lifetime-overlapping tensors never share bytes.

    Tensors are placed largest first (ties by id) at the lowest aligned offset
    that clears every already-placed tensor whose lifetime overlaps.

    Raises:
        InvalidArgumentError: If ``alignment`` is not a power of two.
    """
    if alignment < 1 or alignment & (alignment - 1):
        msg = f"alignment must be a power of two, got {alignment}"
        raise InvalidArgumentError(msg)

    placed: list[tuple[TensorLifetime, int]] = []
    offsets: dict[str, int] = {}
    for lt in sorted(lifetimes, key=lambda t: (-t.size_bytes, t.tensor_id)):
        conflicts = sorted(
            (offset, offset + other.size_bytes)
            for other, offset in placed
            if other.overlaps(lt)
        )
        offset = 0
        for start, end in conflicts:
            if offset + lt.size_bytes <= start:
                break
            offset = max(offset, align_up(end, alignment))
        placed.append((lt, offset))
        offsets[lt.tensor_id] = offset

    arena_bytes = max((offset + lt.size_bytes for lt, offset in placed), default=0)
    aliases = {
        member: lt.tensor_id
        for lt in lifetimes
        for member in lt.members
        if member != lt.tensor_id
    }
    total = unshared_bytes(lifetimes, alignment)
    logger.info(f"🧮 Arena of {arena_bytes} bytes for {len(lifetimes)} lifetimes ({total} bytes unshared)")
    return ArenaPlan(
        offsets=dict(sorted(offsets.items())),
        arena_bytes=arena_bytes,
        alignment=alignment,
        aliases=dict(sorted(aliases.items())),
    )


__all__ = ["align_up", "plan_arena", "unshared_bytes"]
