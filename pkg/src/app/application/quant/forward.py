"""Integer-only encoder forward pass with an FP32 logit accumulation."""

from __future__ import annotations

import logging
import math

import numpy as np

from src.app.application.encoder.attention import causal_mask
from src.app.application.quant.calibration import PATCH_SITE
from src.app.application.quant.kernels import (
    int_add_requant,
    int_linear,
    int_matmul,
    quantize_tensor,
    requant_multiplier,
    requantize,
)
from src.app.application.quant.nonlinear import i_gelu, i_layernorm, i_softmax, int_rope
from src.app.application.tokenizer.embedding import token_indices
from src.app.domain.errors import CalibrationError, ShapeMismatchError
from src.app.domain.model.config import AttentionMaskMode
from src.app.domain.model.types import PatchGrid, TokenSequence
from src.app.domain.quant.types import (
    SOFTMAX_OUT_SCALE,
    SOFTMAX_OUT_ZERO_POINT,
    QuantizedBlock,
    QuantizedModel,
    QuantizedTensor,
)

logger = logging.getLogger(__name__)


def _attention(
    h: QuantizedTensor,
    qb: QuantizedBlock,
    qm: QuantizedModel,
    prefix: str,
    allowed: np.ndarray | None,
) -> QuantizedTensor:
    cfg = qm.config
    d_h = cfg.head_dim
    q = int_linear(h, qb.q, qm.site(f"{prefix}q"))
    k = int_linear(h, qb.k, qm.site(f"{prefix}k"))
    v = int_linear(h, qb.v, qm.site(f"{prefix}v"))
    q = int_rope(q, qm.rope_cos, qm.rope_sin, qm.site(f"{prefix}q_rot"))
    k = int_rope(k, qm.rope_cos, qm.rope_sin, qm.site(f"{prefix}k_rot"))

    attn_qp = qm.site(f"{prefix}attn")
    score_scale = q.qp.scale * k.qp.scale / math.sqrt(d_h)
    m, shift = requant_multiplier(SOFTMAX_OUT_SCALE * v.qp.scale / attn_qp.scale)
    context = np.empty(v.shape, dtype=np.int8)
    for head in range(cfg.heads):
        cols = slice(head * d_h, (head + 1) * d_h)
        # int32 scores, int8 probabilities
        scores = int_matmul(q.data[:, cols], q.qp.zero_point, k.data[:, cols].T, k.qp.zero_point)
        probs = i_softmax(scores, score_scale, allowed)
        acc = int_matmul(probs, SOFTMAX_OUT_ZERO_POINT, v.data[:, cols], v.qp.zero_point)
        context[:, cols] = requantize(acc, m, shift, attn_qp.zero_point)
    return QuantizedTensor(data=context, qp=attn_qp)


def _block(
    x: QuantizedTensor,
    qb: QuantizedBlock,
    qm: QuantizedModel,
    prefix: str,
    allowed: np.ndarray | None,
) -> QuantizedTensor:
    eps = qm.config.ln_eps
    h = i_layernorm(x, qb.ln1_gamma, qb.ln1_beta, qm.site(f"{prefix}ln1"), eps)
    context = _attention(h, qb, qm, prefix, allowed)
    proj = int_linear(context, qb.out, qm.site(f"{prefix}proj"))
    x = int_add_requant(x, proj, qm.site(f"{prefix}res1"))

    h = i_layernorm(x, qb.ln2_gamma, qb.ln2_beta, qm.site(f"{prefix}ln2"), eps)
    fc1 = int_linear(h, qb.fc1, qm.site(f"{prefix}fc1"))
    act = i_gelu(fc1, qb.gelu_table, qm.site(f"{prefix}gelu"))
    fc2 = int_linear(act, qb.fc2, qm.site(f"{prefix}fc2"))
    return int_add_requant(x, fc2, qm.site(f"{prefix}res2"))


def _pooled_logits(
    out: QuantizedTensor,
    channel_of: np.ndarray,
    patch_of: np.ndarray,
    qm: QuantizedModel,
) -> np.ndarray:
    """Classifier on the temporally pooled fusion of int8 final-LN tokens.

    The per-patch concatenations are summed over patches in integers; the
    1 / N_p factor and both scales enter only the FP32 logits.
    """
    cfg = qm.config
    n_patches = cfg.n_patches
    grid = np.zeros((n_patches, cfg.channels, cfg.embed_dim), dtype=np.int64)
    grid[patch_of, channel_of] = out.data.astype(np.int64) - out.qp.zero_point
    pooled_sum = grid.sum(axis=0).reshape(-1)

    head = qm.classifier
    acc = head.weight.data.astype(np.int64) @ pooled_sum + n_patches * head.bias.astype(np.int64)
    scales = out.qp.scale * head.weight.row_scales() / n_patches
    return (acc.astype(np.float64) * scales).astype(np.float32)


def _encode(
    x: QuantizedTensor,
    channel_of: np.ndarray,
    patch_of: np.ndarray,
    qm: QuantizedModel,
    mask: AttentionMaskMode,
) -> np.ndarray:
    cfg = qm.config
    allowed = causal_mask(cfg.n_tokens) if mask == "causal" else None
    for index, qb in enumerate(qm.blocks):
        x = _block(x, qb, qm, f"blocks.{index}.", allowed)
    out = i_layernorm(
        x, qm.final_ln_gamma, qm.final_ln_beta, qm.site("final_ln"), cfg.ln_eps
    )
    logits = _pooled_logits(out, channel_of, patch_of, qm)
    logger.debug(f"Integer forward over {cfg.n_tokens} tokens ({mask})")
    return logits


def quantized_forward(
    seq: TokenSequence,
    qm: QuantizedModel,
    mask: AttentionMaskMode = "bidirectional",
) -> np.ndarray:
    """FP32 logits from FP embeddings quantized at the ``embed`` site.

    Raises:
        ShapeMismatchError: If the sequence does not match the model config.
        CalibrationError: If a site the integer path reads was never calibrated.
    """
    cfg = qm.config
    if seq.embeddings.shape != (cfg.n_tokens, cfg.embed_dim):
        msg = (
            f"Token sequence shape {seq.embeddings.shape} does not match config "
            f"({cfg.n_tokens}, {cfg.embed_dim})"
        )
        raise ShapeMismatchError(msg)
    x = quantize_tensor(seq.embeddings, qm.site("embed"))
    return _encode(x, seq.channel_of, seq.patch_of, qm, mask)


def quantized_forward_patches(
    grid: PatchGrid,
    qm: QuantizedModel,
    mask: AttentionMaskMode = "bidirectional",
) -> np.ndarray:
    """Same as ``quantized_forward`` with the patch projection in int8 too.

    Raises:
        CalibrationError: If the model carries no integer patch projection.
        ShapeMismatchError: If the grid does not match the model config.
    """
    cfg = qm.config
    if qm.patch_proj is None or PATCH_SITE not in qm.sites:
        raise CalibrationError("Model was calibrated without the patches site")
    if grid.patches.shape != (cfg.channels, cfg.n_patches, cfg.patch_len):
        msg = (
            f"Patch grid {grid.patches.shape} does not match config "
            f"({cfg.channels}, {cfg.n_patches}, {cfg.patch_len})"
        )
        raise ShapeMismatchError(msg)
    patches = quantize_tensor(grid.flat(), qm.site(PATCH_SITE))
    x = int_linear(patches, qm.patch_proj, qm.site("embed"))
    channel_of, patch_of = token_indices(grid.channels, grid.n_patches)
    return _encode(x, channel_of, patch_of, qm, mask)


__all__ = ["quantized_forward", "quantized_forward_patches"]
