"""Parameter initialization and exact parameter accounting."""

from __future__ import annotations

import numpy as np

from src.app.application.tokenizer.embedding import init_tokenizer_weights
from src.app.domain.model.config import HeadConfig, ModelConfig
from src.app.domain.model.types import (
    BlockWeights,
    ClassifierHead,
    DecoderWeights,
    EncoderWeights,
    ParamReport,
    RegressionHead,
)


def _normal(rng: np.random.Generator, shape: tuple[int, ...], std: float) -> np.ndarray:
    return (rng.standard_normal(shape) * std).astype(np.float32)


def init_block_weights(cfg: ModelConfig, rng: np.random.Generator, std: float) -> BlockWeights:
    d, m = cfg.embed_dim, cfg.mlp_dim
    ones = np.ones(d, dtype=np.float32)
    zeros = np.zeros(d, dtype=np.float32)
    return BlockWeights(
        ln1_gamma=ones.copy(),
        ln1_beta=zeros.copy(),
        w_qkv=_normal(rng, (3 * d, d), std),
        b_qkv=np.zeros(3 * d, dtype=np.float32),
        w_out=_normal(rng, (d, d), std),
        b_out=zeros.copy(),
        ln2_gamma=ones.copy(),
        ln2_beta=zeros.copy(),
        w_fc1=_normal(rng, (m, d), std),
        b_fc1=np.zeros(m, dtype=np.float32),
        w_fc2=_normal(rng, (d, m), std),
        b_fc2=zeros.copy(),
    )


def init_encoder_weights(cfg: ModelConfig, seed: int, std: float = 0.02) -> EncoderWeights:
    """Deterministic random encoder from a PCG64 seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    tokenizer = init_tokenizer_weights(cfg, rng, std)
    blocks = [init_block_weights(cfg, rng, std) for _ in range(cfg.layers)]
    return EncoderWeights(
        config=cfg,
        tokenizer=tokenizer,
        blocks=blocks,
        final_ln_gamma=np.ones(cfg.embed_dim, dtype=np.float32),
        final_ln_beta=np.zeros(cfg.embed_dim, dtype=np.float32),
    )


def _size(*arrays: np.ndarray) -> int:
    return int(sum(a.size for a in arrays))


def count_parameters(
    w: EncoderWeights,
    decoder: DecoderWeights | None = None,
    classifier: ClassifierHead | None = None,
    regression: RegressionHead | None = None,
) -> ParamReport:
    """Count parameters from the stored arrays."""
    per_block = [
        _size(
            b.ln1_gamma, b.ln1_beta, b.w_qkv, b.b_qkv, b.w_out, b.b_out,
            b.ln2_gamma, b.ln2_beta, b.w_fc1, b.b_fc1, b.w_fc2, b.b_fc2,
        )
        for b in w.blocks
    ]
    regression_count = 0
    if regression is not None:
        regression_count = _size(regression.w_in, regression.b_in, regression.w_out, regression.b_out)
        for blk in regression.blocks:
            regression_count += _size(blk.dw_kernel, blk.dw_bias, blk.pw_weight, blk.pw_bias)

    return ParamReport(
        tokenizer=_size(w.tokenizer.w_proj, w.tokenizer.b_proj),
        mask_token=_size(w.tokenizer.mask_token),
        per_block=per_block[0] if per_block else 0,
        blocks=sum(per_block),
        final_ln=_size(w.final_ln_gamma, w.final_ln_beta),
        decoder=_size(decoder.w_dec, decoder.b_dec) if decoder is not None else 0,
        classifier=_size(classifier.w, classifier.b) if classifier is not None else 0,
        regression=regression_count,
    )


def expected_parameters(
    cfg: ModelConfig,
    head: HeadConfig | None = None,
    *,
    decoder: bool = True,
) -> ParamReport:
    """Closed-form counts for a config, without allocating weights."""
    d, m, length = cfg.embed_dim, cfg.mlp_dim, cfg.patch_len
    per_block = 4 * d * d + 2 * m * d + (3 * d + d + m + d) + 4 * d
    classifier = regression = 0
    if head is not None:
        classifier = head.num_classes * cfg.fused_dim + head.num_classes
        h, k = head.regression_hidden, head.regression_kernel
        regression = (
            cfg.fused_dim * h + h
            + head.regression_blocks * (h * k + h + h * h + h)
            + h * head.regression_outputs + head.regression_outputs
        )
    return ParamReport(
        tokenizer=d * length + d,
        mask_token=d,
        per_block=per_block,
        blocks=cfg.layers * per_block,
        final_ln=2 * d,
        decoder=(length * d + length) if decoder else 0,
        classifier=classifier,
        regression=regression,
    )


__all__ = [
    "count_parameters",
    "expected_parameters",
    "init_block_weights",
    "init_encoder_weights",
]
