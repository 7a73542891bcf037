"""Op graph of the integer inference path, for arena planning."""

from __future__ import annotations

from src.app.domain.model.config import ModelConfig
from src.app.domain.planner.types import OpGraph, OpSpec, TensorDef

INT8 = 1
INT16 = 2
INT32 = 4


def _op(name: str, inputs: tuple[str, ...], *outputs: TensorDef) -> OpSpec:
    return OpSpec(name=name, inputs=inputs, outputs=outputs)


def _block_ops(cfg: ModelConfig, index: int, x: str) -> tuple[list[OpSpec], str]:
    n, d, m = cfg.n_tokens, cfg.embed_dim, cfg.mlp_dim
    act = n * d * INT8
    stream = n * d * INT16
    p = f"blocks.{index}."
    ops = [
        _op(f"{p}ln1", (x,), TensorDef(f"{p}h1", act)),
        _op(
            f"{p}qkv",
            (f"{p}h1",),
            TensorDef(f"{p}q", act),
            TensorDef(f"{p}k", act),
            TensorDef(f"{p}v", act),
        ),
        _op(
            f"{p}rope",
            (f"{p}q", f"{p}k"),
            TensorDef(f"{p}q_rot", act),
            TensorDef(f"{p}k_rot", act),
        ),
        _op(
            f"{p}scores",
            (f"{p}q_rot", f"{p}k_rot"),
            TensorDef(f"{p}scores", n * n * cfg.heads * INT32),
        ),
        _op(f"{p}softmax", (f"{p}scores",), TensorDef(f"{p}probs", n * n * cfg.heads * INT8)),
        _op(f"{p}av", (f"{p}probs", f"{p}v"), TensorDef(f"{p}ctx", act)),
        _op(f"{p}proj", (f"{p}ctx",), TensorDef(f"{p}proj", act)),
        _op(f"{p}add1", (x, f"{p}proj"), TensorDef(f"{p}res1", stream, inplace_of=x)),
        _op(f"{p}ln2", (f"{p}res1",), TensorDef(f"{p}h2", act)),
        _op(f"{p}fc1", (f"{p}h2",), TensorDef(f"{p}fc1", n * m * INT8)),
        _op(
            f"{p}gelu",
            (f"{p}fc1",),
            TensorDef(f"{p}gelu", n * m * INT8, inplace_of=f"{p}fc1"),
        ),
        _op(f"{p}fc2", (f"{p}gelu",), TensorDef(f"{p}fc2", act)),
        _op(
            f"{p}add2",
            (f"{p}res1", f"{p}fc2"),
            TensorDef(f"{p}res2", stream, inplace_of=f"{p}res1"),
        ),
    ]
    return ops, f"{p}res2"


def build_inference_graph(cfg: ModelConfig, num_classes: int) -> OpGraph:
    """Patch input through every block to the classifier logits.

    Activations are int8 except the 16-bit residual stream; attention scores,
    the pooled feature sum, and the logits are 4 bytes wide. Residual adds and GELU are flagged in-place.
    """
    n, d = cfg.n_tokens, cfg.embed_dim
    ops = [
        _op("input", (), TensorDef("patches", n * cfg.patch_len * INT8)),
        _op("embed", ("patches",), TensorDef("embed", n * d * INT16)),
    ]
    x = "embed"
    for index in range(cfg.layers):
        block, x = _block_ops(cfg, index, x)
        ops.extend(block)
    ops += [
        _op("final_ln", (x,), TensorDef("final_ln", n * d * INT8)),
        _op("pool", ("final_ln",), TensorDef("pooled", cfg.fused_dim * INT32)),
        _op("classifier", ("pooled",), TensorDef("logits", num_classes * INT32)),
    ]
    return OpGraph(ops=tuple(ops), outputs=("logits",))


__all__ = ["build_inference_graph"]
