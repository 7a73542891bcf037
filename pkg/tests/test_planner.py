"""Liveness, arena planning, and plan verification."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.app.application.planner import (
    build_inference_graph,
    compute_liveness,
    liveness_lower_bound,
    plan_arena,
    unshared_bytes,
    verify_plan,
)
from src.app.domain.errors import ConfigValidationError, GraphOrderError, InvalidArgumentError
from src.app.domain.model.config import ModelConfig
from src.app.domain.planner.types import ArenaPlan, OpGraph, OpSpec, TensorDef, TensorLifetime
from src.app.infrastructure.storage.json_codec import (
    graph_from_dict,
    graph_to_dict,
    plan_from_dict,
    plan_to_dict,
)


def _chain(*sizes: int) -> OpGraph:
    """t0 -> t1 -> ... where op i consumes t{i-1}."""
    ops = [OpSpec("op0", (), (TensorDef("t0", sizes[0]),))]
    ops += [
        OpSpec(f"op{i}", (f"t{i - 1}",), (TensorDef(f"t{i}", size),))
        for i, size in enumerate(sizes[1:], start=1)
    ]
    return OpGraph(ops=tuple(ops))


def test_two_overlapping_tensors_respect_alignment():
    lifetimes = [TensorLifetime("a", 100, 0, 1, ("a",)), TensorLifetime("b", 80, 0, 1, ("b",))]
    plan = plan_arena(lifetimes, alignment=16)
    assert plan.offsets == {"a": 0, "b": 112}
    assert plan.arena_bytes == 192
    assert verify_plan(lifetimes, plan) == []


def test_disjoint_lifetimes_share_offset_zero():
    lifetimes = [TensorLifetime("a", 64, 0, 1, ("a",)), TensorLifetime("b", 64, 2, 3, ("b",))]
    plan = plan_arena(lifetimes)
    assert plan.offsets == {"a": 0, "b": 0}
    assert plan.arena_bytes == 64


def test_chain_liveness_is_inclusive():
    lifetimes = {lt.tensor_id: lt for lt in compute_liveness(_chain(10, 20, 30))}
    assert (lifetimes["t0"].def_step, lifetimes["t0"].last_use_step) == (0, 1)
    assert (lifetimes["t1"].def_step, lifetimes["t1"].last_use_step) == (1, 2)
    # unconsumed tensors are graph outputs and live to the end
    assert (lifetimes["t2"].def_step, lifetimes["t2"].last_use_step) == (2, 2)


def test_declared_outputs_live_until_the_final_op():
    g = OpGraph(
        ops=(
            OpSpec("a", (), (TensorDef("x", 8),)),
            OpSpec("b", ("x",), (TensorDef("y", 8),)),
            OpSpec("c", ("y",), (TensorDef("z", 8),)),
        ),
        outputs=("x", "z"),
    )
    lifetimes = {lt.tensor_id: lt for lt in compute_liveness(g)}
    assert lifetimes["x"].last_use_step == 2


def test_lower_bound_counts_the_busiest_step():
    assert liveness_lower_bound(compute_liveness(_chain(10, 20, 30))) == 50
    assert liveness_lower_bound([]) == 0


def test_use_before_definition_is_a_graph_order_error():
    g = OpGraph(ops=(OpSpec("a", ("ghost",), (TensorDef("x", 4),)),))
    with pytest.raises(GraphOrderError, match="ghost"):
        compute_liveness(g)


def test_double_definition_is_a_graph_order_error():
    g = OpGraph(ops=(OpSpec("a", (), (TensorDef("x", 4),)), OpSpec("b", (), (TensorDef("x", 4),))))
    with pytest.raises(GraphOrderError, match="defined twice"):
        compute_liveness(g)


def test_undefined_graph_output_is_a_graph_order_error():
    with pytest.raises(GraphOrderError):
        compute_liveness(OpGraph(ops=_chain(4).ops, outputs=("missing",)))


def test_non_positive_size_is_rejected():
    with pytest.raises(InvalidArgumentError):
        compute_liveness(_chain(4, 0))


def test_alignment_must_be_a_power_of_two():
    with pytest.raises(InvalidArgumentError):
        plan_arena([], alignment=12)


def _inplace_graph(reuse_source_later: bool) -> OpGraph:
    ops = [
        OpSpec("load", (), (TensorDef("x", 32),)),
        OpSpec("act", ("x",), (TensorDef("y", 32, inplace_of="x"),)),
    ]
    if reuse_source_later:
        ops.append(OpSpec("add", ("x", "y"), (TensorDef("z", 32),)))
    return OpGraph(ops=tuple(ops))


def test_inplace_output_joins_its_input_buffer():
    lifetimes = compute_liveness(_inplace_graph(False), merge_inplace=True)
    assert len(lifetimes) == 1
    assert lifetimes[0].members == ("x", "y")
    plan = plan_arena(lifetimes)
    assert plan.aliases == {"y": "x"}
    assert plan.offset_of("y") == plan.offset_of("x") == 0
    assert plan.arena_bytes == 32


def test_inplace_is_ignored_when_the_input_is_read_later():
    lifetimes = compute_liveness(_inplace_graph(True), merge_inplace=True)
    assert sorted(lt.tensor_id for lt in lifetimes) == ["x", "y", "z"]


def test_inplace_source_must_be_an_op_input():
    g = OpGraph(
        ops=(
            OpSpec("a", (), (TensorDef("x", 8),)),
            OpSpec("b", (), (TensorDef("y", 8, inplace_of="x"),)),
        )
    )
    with pytest.raises(GraphOrderError):
        compute_liveness(g, merge_inplace=True)


def test_verify_reports_overlapping_ranges():
    lifetimes = [TensorLifetime("a", 16, 0, 2, ("a",)), TensorLifetime("b", 16, 1, 3, ("b",))]
    bad = ArenaPlan(offsets={"a": 0, "b": 8}, arena_bytes=24, alignment=4)
    violations = verify_plan(lifetimes, bad)
    assert [(v.first, v.second) for v in violations] == [("a", "b")]


def test_verify_reports_missing_and_misaligned_offsets():
    lifetimes = [TensorLifetime("a", 16, 0, 0, ("a",)), TensorLifetime("b", 16, 1, 1, ("b",))]
    violations = verify_plan(lifetimes, ArenaPlan(offsets={"a": 2}, arena_bytes=32, alignment=4))
    errors = {v.first: v.error for v in violations}
    assert "not aligned" in errors["a"]
    assert errors["b"] == "missing offset"


@st.composite
def random_graphs(draw) -> OpGraph:
    count = draw(st.integers(min_value=1, max_value=40))
    ops = []
    for i in range(count):
        inputs = []
        if i:
            earlier = st.integers(min_value=0, max_value=i - 1)
            inputs = draw(st.lists(earlier, max_size=3, unique=True))
        size = draw(st.integers(min_value=1, max_value=4096))
        ops.append(OpSpec(f"op{i}", tuple(f"t{j}" for j in inputs), (TensorDef(f"t{i}", size),)))
    return OpGraph(ops=tuple(ops))


@settings(max_examples=100, deadline=None)
@given(random_graphs(), st.sampled_from([1, 4, 16, 64]))
def test_random_graphs_plan_without_violations(g, alignment):
    lifetimes = compute_liveness(g)
    plan = plan_arena(lifetimes, alignment)
    assert verify_plan(lifetimes, plan) == []
    assert liveness_lower_bound(lifetimes) <= plan.arena_bytes <= unshared_bytes(lifetimes, alignment)


def test_encoder_graph_reuses_most_of_its_memory():
    g = build_inference_graph(ModelConfig(), num_classes=6)
    lifetimes = compute_liveness(g)
    plan = plan_arena(lifetimes)
    assert verify_plan(lifetimes, plan) == []
    assert plan.arena_bytes <= 0.6 * unshared_bytes(lifetimes)


def test_merging_inplace_folds_residuals_and_gelu(tiny_config):
    g = build_inference_graph(tiny_config, num_classes=3)
    merged_lifetimes = compute_liveness(g, merge_inplace=True)
    merged = plan_arena(merged_lifetimes)
    assert verify_plan(merged_lifetimes, merged) == []
    assert len(merged_lifetimes) < len(compute_liveness(g))
    assert merged.arena_bytes <= unshared_bytes(merged_lifetimes)


def test_graph_and_plan_json_round_trip(tiny_config):
    g = build_inference_graph(tiny_config, num_classes=3)
    assert graph_from_dict(graph_to_dict(g)) == g
    plan = plan_arena(compute_liveness(g, merge_inplace=True), alignment=8)
    assert plan_from_dict(plan_to_dict(plan)) == plan


def test_graph_documents_reject_unknown_fields():
    with pytest.raises(ConfigValidationError):
        graph_from_dict({"ops": [{"name": "a", "outputs": [{"id": "x", "size": 4, "dtype": "i8"}]}]})
