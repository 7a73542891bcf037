"""Brute-force pairwise check of an arena plan."""

from __future__ import annotations

from itertools import combinations

from src.app.domain.planner.types import ArenaPlan, PlanViolation, TensorLifetime


def verify_plan(lifetimes: list[TensorLifetime], plan: ArenaPlan) -> list[PlanViolation]:
    """Every pair of lifetime-overlapping tensors whose byte ranges intersect.

    Missing offsets, misaligned offsets, and ranges past ``arena_bytes`` are
    reported too. Returns an empty list for a valid plan.
    """
    violations: list[PlanViolation] = []
    placed: list[TensorLifetime] = []
    for lt in sorted(lifetimes, key=lambda t: t.tensor_id):
        offset = plan.offsets.get(lt.tensor_id)
        if offset is None:
            violations.append(PlanViolation(lt.tensor_id, "", "missing offset"))
            continue
        if offset % plan.alignment:
            violations.append(
                PlanViolation(lt.tensor_id, "", f"offset {offset} not aligned to {plan.alignment}")
            )
        if offset < 0 or offset + lt.size_bytes > plan.arena_bytes:
            violations.append(
                PlanViolation(lt.tensor_id, "", f"range [{offset}, {offset + lt.size_bytes}) outside arena")
            )
        placed.append(lt)

    for a, b in combinations(placed, 2):
        if not a.overlaps(b):
            continue
        a_off, b_off = plan.offsets[a.tensor_id], plan.offsets[b.tensor_id]
        if a_off < b_off + b.size_bytes and b_off < a_off + a.size_bytes:
            violations.append(
                PlanViolation(
                    a.tensor_id,
                    b.tensor_id,
                    f"[{a_off}, {a_off + a.size_bytes}) intersects [{b_off}, {b_off + b.size_bytes})",
                )
            )
    return violations


__all__ = ["verify_plan"]
