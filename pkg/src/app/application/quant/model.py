"""Post-training quantization of a calibrated encoder and its classifier."""

from __future__ import annotations

import logging

import numpy as np

from src.app.application.encoder.rope import rope_positions
from src.app.application.quant.calibration import PATCH_SITE
from src.app.application.quant.kernels import quantize_bias, quantize_weight
from src.app.application.quant.nonlinear import (
    ROPE_FRAC_BITS,
    build_gelu_table,
    build_rope_tables,
    requant_audit,
)
from src.app.domain.errors import CalibrationError, ShapeMismatchError
from src.app.domain.model.types import BlockWeights, ClassifierHead, EncoderWeights
from src.app.domain.quant.types import (
    SOFTMAX_OUT_SCALE,
    QuantizedBlock,
    QuantizedLinear,
    QuantizedModel,
    QuantParams,
)

logger = logging.getLogger(__name__)


def _linear(
    w: np.ndarray, b: np.ndarray, input_scale: float, per_channel: bool
) -> QuantizedLinear:
    weight = quantize_weight(w, per_channel)
    return QuantizedLinear(weight=weight, bias=quantize_bias(b, input_scale, weight))


def _site(sites: dict[str, QuantParams], name: str) -> QuantParams:
    try:
        return sites[name]
    except KeyError:
        msg = f"Activation site '{name}' was not calibrated"
        raise CalibrationError(msg) from None


def _quantize_block(
    block: BlockWeights,
    prefix: str,
    sites: dict[str, QuantParams],
    per_channel: bool,
) -> QuantizedBlock:
    d = block.w_out.shape[0]
    s_ln1 = _site(sites, f"{prefix}ln1").scale
    s_ln2 = _site(sites, f"{prefix}ln2").scale
    w_q, w_k, w_v = (block.w_qkv[i * d : (i + 1) * d] for i in range(3))
    b_q, b_k, b_v = (block.b_qkv[i * d : (i + 1) * d] for i in range(3))
    return QuantizedBlock(
        ln1_gamma=block.ln1_gamma.astype(np.float32),
        ln1_beta=block.ln1_beta.astype(np.float32),
        q=_linear(w_q, b_q, s_ln1, per_channel),
        k=_linear(w_k, b_k, s_ln1, per_channel),
        v=_linear(w_v, b_v, s_ln1, per_channel),
        out=_linear(block.w_out, block.b_out, _site(sites, f"{prefix}attn").scale, per_channel),
        ln2_gamma=block.ln2_gamma.astype(np.float32),
        ln2_beta=block.ln2_beta.astype(np.float32),
        fc1=_linear(block.w_fc1, block.b_fc1, s_ln2, per_channel),
        fc2=_linear(block.w_fc2, block.b_fc2, _site(sites, f"{prefix}gelu").scale, per_channel),
        gelu_table=build_gelu_table(_site(sites, f"{prefix}fc1"), _site(sites, f"{prefix}gelu")),
    )


def _linear_ratios(layer: QuantizedLinear, s_in: float, s_out: float) -> list[float]:
    return list(s_in * layer.weight.row_scales() / s_out)


def _block_ratios(qb: QuantizedBlock, prefix: str, sites: dict[str, QuantParams]) -> list[float]:
    """Every rescale ratio a block's integer kernels turn into a multiplier."""
    s = {name: _site(sites, f"{prefix}{name}").scale for name in (
        "ln1", "q", "k", "v", "q_rot", "k_rot", "attn", "proj", "ln2", "fc1", "gelu", "fc2",
    )}
    ratios = (
        _linear_ratios(qb.q, s["ln1"], s["q"])
        + _linear_ratios(qb.k, s["ln1"], s["k"])
        + _linear_ratios(qb.v, s["ln1"], s["v"])
        + _linear_ratios(qb.out, s["attn"], s["proj"])
        + _linear_ratios(qb.fc1, s["ln2"], s["fc1"])
        + _linear_ratios(qb.fc2, s["gelu"], s["fc2"])
    )
    ratios.append(s["q"] / (s["q_rot"] * (1 << ROPE_FRAC_BITS)))
    ratios.append(s["k"] / (s["k_rot"] * (1 << ROPE_FRAC_BITS)))
    ratios.append(SOFTMAX_OUT_SCALE * s["v"] / s["attn"])
    return ratios


def quantize_model(
    weights: EncoderWeights,
    classifier: ClassifierHead,
    sites: dict[str, QuantParams],
    per_channel: bool = False,
) -> QuantizedModel:
    """Quantize every linear weight to int8 with int32 biases.

    LayerNorm gamma/beta stay full precision. The classifier bias sits on the
    grid s_final_ln * s_w so the logit accumulation needs no extra rescale.
    The patch projection is quantized only when the ``patches`` site was
    calibrated.

    Raises:
        CalibrationError: If a site the integer path reads is missing.
        ShapeMismatchError: If the classifier does not fit the encoder.
    """
    cfg = weights.config
    if classifier.w.shape[1] != cfg.fused_dim:
        msg = f"Classifier input {classifier.w.shape[1]} does not match C * d_e = {cfg.fused_dim}"
        raise ShapeMismatchError(msg)

    patch_proj = None
    if PATCH_SITE in sites:
        tok = weights.tokenizer
        patch_proj = _linear(tok.w_proj, tok.b_proj, sites[PATCH_SITE].scale, per_channel)
    _site(sites, "embed")

    blocks = [
        _quantize_block(block, f"blocks.{i}.", sites, per_channel)
        for i, block in enumerate(weights.blocks)
    ]
    s_final = _site(sites, "final_ln").scale
    head = _linear(classifier.w, classifier.b, s_final, per_channel)
    rope_cos, rope_sin = build_rope_tables(rope_positions(cfg), cfg.head_dim, cfg.rope_base)

    ratios: list[float] = []
    for i, qb in enumerate(blocks):
        ratios += _block_ratios(qb, f"blocks.{i}.", sites)
    if patch_proj is not None:
        ratios += _linear_ratios(patch_proj, sites[PATCH_SITE].scale, sites["embed"].scale)
    worst = requant_audit(ratios)

    logger.info(
        f"🔢 Quantized {len(blocks)} blocks and a {classifier.num_classes}-class head "
        f"({'per-channel' if per_channel else 'per-tensor'} weights)"
    )
    return QuantizedModel(
        config=cfg,
        sites=dict(sites),
        patch_proj=patch_proj,
        blocks=blocks,
        final_ln_gamma=weights.final_ln_gamma.astype(np.float32),
        final_ln_beta=weights.final_ln_beta.astype(np.float32),
        classifier=head,
        rope_cos=rope_cos,
        rope_sin=rope_sin,
        per_channel=per_channel,
        metadata={
            "per_channel": str(per_channel).lower(),
            "requant_worst_rel_error": repr(worst),
            "sites": str(len(sites)),
        },
    )


__all__ = ["quantize_model"]
