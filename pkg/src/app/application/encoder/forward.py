"""FP32 reference encoder forward pass."""

from __future__ import annotations

import logging

import numpy as np

from src.app.application.encoder.attention import ActivationObserver, mhsa
from src.app.application.encoder.functional import gelu, layer_norm
from src.app.application.encoder.rope import rope_positions
from src.app.domain.errors import NumericFailureError, ShapeMismatchError
from src.app.domain.model.config import AttentionMaskMode
from src.app.domain.model.types import EncoderWeights, TokenSequence

logger = logging.getLogger(__name__)


def _check_finite(x: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(x)):
        msg = f"Non-finite activations in {where}"
        raise NumericFailureError(msg)


def encoder_forward(
    seq: TokenSequence,
    w: EncoderWeights,
    mask: AttentionMaskMode = "bidirectional",
    observer: ActivationObserver | None = None,
) -> np.ndarray:
    """Run the pre-LN blocks and the final LayerNorm.

    Each block computes ``x += MHSA(LN1(x))`` then
    ``x += FC2(GELU(FC1(LN2(x))))``. Dropout and drop-path are inference no-ops
    and do not appear here.

    Args:
        seq: Token sequence of N = C * N_p tokens.
        w: Encoder weights.
        mask: Attention mask mode.
        observer: Optional callback receiving every named activation site.

    Returns:
        Final hidden states, [N, d_e].

    Raises:
        ShapeMismatchError: If the sequence does not match the weights' config.
        NumericFailureError: If a block produces NaN or infinity.
    """
    cfg = w.config
    x = np.asarray(seq.embeddings, dtype=np.float64)
    if x.shape != (cfg.n_tokens, cfg.embed_dim):
        msg = (
            f"Token sequence shape {x.shape} does not match config "
            f"({cfg.n_tokens}, {cfg.embed_dim})"
        )
        raise ShapeMismatchError(msg)

    positions = rope_positions(cfg)
    eps = cfg.ln_eps
    if observer is not None:
        observer("embed", x)

    for index, block in enumerate(w.blocks):
        prefix = f"blocks.{index}."
        h = layer_norm(x, block.ln1_gamma, block.ln1_beta, eps)
        attn = mhsa(
            h,
            block,
            mask,
            positions,
            heads=cfg.heads,
            rope_base=cfg.rope_base,
            observe=observer,
            prefix=prefix,
        )
        x = x + attn
        if observer is not None:
            observer(f"{prefix}ln1", h)
            observer(f"{prefix}res1", x)

        h = layer_norm(x, block.ln2_gamma, block.ln2_beta, eps)
        fc1 = h @ block.w_fc1.astype(np.float64).T + block.b_fc1
        act = gelu(fc1)
        fc2 = act @ block.w_fc2.astype(np.float64).T + block.b_fc2
        x = x + fc2
        if observer is not None:
            observer(f"{prefix}ln2", h)
            observer(f"{prefix}fc1", fc1)
            observer(f"{prefix}gelu", act)
            observer(f"{prefix}fc2", fc2)
            observer(f"{prefix}res2", x)

        _check_finite(x, f"block {index}")

    out = layer_norm(x, w.final_ln_gamma, w.final_ln_beta, eps)
    _check_finite(out, "final_ln")
    if observer is not None:
        observer("final_ln", out)
    logger.debug(f"Encoded {x.shape[0]} tokens through {len(w.blocks)} blocks ({mask})")
    return out


__all__ = ["encoder_forward"]
