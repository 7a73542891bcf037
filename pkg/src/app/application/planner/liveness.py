"""Tensor lifetimes over an execution-ordered op graph."""

from __future__ import annotations

import logging

from src.app.domain.errors import GraphOrderError, InvalidArgumentError
from src.app.domain.planner.types import OpGraph, TensorLifetime

logger = logging.getLogger(__name__)


def _definitions(g: OpGraph) -> tuple[dict[str, int], dict[str, int], dict[str, int]]:
    """(def_step, last_use_step, size) per tensor, validating execution order."""
    def_step: dict[str, int] = {}
    last_use: dict[str, int] = {}
    sizes: dict[str, int] = {}
    for step, op in enumerate(g.ops):
        for tensor_id in op.inputs:
            if tensor_id not in def_step:
                msg = f"Op '{op.name}' (step {step}) consumes '{tensor_id}' before it is defined"
                raise GraphOrderError(msg)
            last_use[tensor_id] = step
        for tensor in op.outputs:
            if tensor.tensor_id in def_step:
                msg = f"Tensor '{tensor.tensor_id}' is defined twice (again by '{op.name}')"
                raise GraphOrderError(msg)
            if tensor.size_bytes <= 0:
                msg = f"Tensor '{tensor.tensor_id}' has non-positive size {tensor.size_bytes}"
                raise InvalidArgumentError(msg)
            def_step[tensor.tensor_id] = step
            last_use[tensor.tensor_id] = step
            sizes[tensor.tensor_id] = tensor.size_bytes
    return def_step, last_use, sizes


def _graph_outputs(g: OpGraph, def_step: dict[str, int]) -> list[str]:
    if g.outputs:
        for tensor_id in g.outputs:
            if tensor_id not in def_step:
                msg = f"Graph output '{tensor_id}' is never defined"
                raise GraphOrderError(msg)
        return list(g.outputs)
    consumed = {tensor_id for op in g.ops for tensor_id in op.inputs}
    return [tensor_id for tensor_id in def_step if tensor_id not in consumed]


def _inplace_roots(g: OpGraph, def_step: dict[str, int], last_use: dict[str, int]) -> dict[str, str]:
    """Map every tensor to the tensor whose buffer it reuses (itself if none).

    An output flagged ``inplace_of`` joins its input's buffer only when the op
    is that input's final consumer.
    """
    root = {tensor_id: tensor_id for tensor_id in def_step}
    for step, op in enumerate(g.ops):
        for tensor in op.outputs:
            source = tensor.inplace_of
            if source is None:
                continue
            if source not in op.inputs:
                msg = f"'{tensor.tensor_id}' is in-place of '{source}', which '{op.name}' does not consume"
                raise GraphOrderError(msg)
            if last_use[source] == step:
                root[tensor.tensor_id] = root[source]
    return root


def compute_liveness(g: OpGraph, merge_inplace: bool = False) -> list[TensorLifetime]:
    """Inclusive [def_step, last_use_step] per tensor, in definition order.

    Graph outputs live until the final op. With ``merge_inplace`` an in-place
    output and its input become one lifetime spanning both, keyed by the
    input's id and listing both in ``members``.

    Raises:
        GraphOrderError: If a tensor is consumed before it is defined, defined
            twice, or an output is never defined.
    """
    def_step, last_use, sizes = _definitions(g)
    final_step = len(g.ops) - 1
    for tensor_id in _graph_outputs(g, def_step):
        last_use[tensor_id] = final_step

    root = (
        _inplace_roots(g, def_step, last_use)
        if merge_inplace
        else {tensor_id: tensor_id for tensor_id in def_step}
    )
    groups: dict[str, list[str]] = {}
    for tensor_id in def_step:
        groups.setdefault(root[tensor_id], []).append(tensor_id)

    lifetimes = [
        TensorLifetime(
            tensor_id=head,
            size_bytes=max(sizes[m] for m in members),
            def_step=min(def_step[m] for m in members),
            last_use_step=max(last_use[m] for m in members),
            members=tuple(members),
        )
        for head, members in groups.items()
    ]
    logger.debug(f"Liveness: {len(def_step)} tensors in {len(lifetimes)} lifetimes")
    return lifetimes


def liveness_lower_bound(lifetimes: list[TensorLifetime]) -> int:
    """Largest total size of simultaneously live tensors over all steps."""
    if not lifetimes:
        return 0
    last = max(lt.last_use_step for lt in lifetimes)
    return max(
        sum(lt.size_bytes for lt in lifetimes if lt.def_step <= step <= lt.last_use_step)
        for step in range(last + 1)
    )


__all__ = ["compute_liveness", "liveness_lower_bound"]
