"""Patch decoder and the masked-reconstruction objective."""

from __future__ import annotations

import numpy as np

from src.app.application.encoder.forward import encoder_forward
from src.app.domain.errors import InvalidArgumentError, ShapeMismatchError
from src.app.domain.model.config import AttentionMaskMode, ModelConfig
from src.app.domain.model.types import (
    DecoderWeights,
    EncoderWeights,
    LossReport,
    PatchGrid,
    TokenSequence,
)

SMOOTH_L1_BETA = 1.0
VISIBLE_WEIGHT = 0.1


def decode_patches(h: np.ndarray, w: DecoderWeights, channels: int) -> PatchGrid:
    """Map every hidden state back to a patch: W_dec @ h[k] + b_dec."""
    h = np.asarray(h, dtype=np.float64)
    n, d = h.shape
    if d != w.w_dec.shape[1] or n % channels:
        msg = f"Hidden states {h.shape} do not fit decoder {w.w_dec.shape} with C={channels}"
        raise ShapeMismatchError(msg)
    flat = h @ w.w_dec.astype(np.float64).T + w.b_dec
    return PatchGrid(patches=flat.reshape(channels, n // channels, -1))


def smooth_l1(a: np.ndarray | float, b: np.ndarray | float, beta: float = SMOOTH_L1_BETA):
    """Elementwise Smooth L1: quadratic below beta, linear above."""
    if not beta > 0:
        msg = f"Smooth L1 beta must be positive, got {beta}"
        raise InvalidArgumentError(msg)
    diff = np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
    loss = np.where(diff < beta, 0.5 * diff**2 / beta, diff - 0.5 * beta)
    return float(loss) if loss.ndim == 0 else loss


def masked_loss(
    target: PatchGrid,
    prediction: PatchGrid,
    flags: np.ndarray,
    beta: float = SMOOTH_L1_BETA,
) -> LossReport:
    """Mean Smooth L1 over masked and over visible patch elements.

    ``l_total = l_masked + 0.1 * l_visible``; an empty set contributes 0.
    """
    if target.patches.shape != prediction.patches.shape:
        msg = f"Patch grids differ: {target.patches.shape} vs {prediction.patches.shape}"
        raise ShapeMismatchError(msg)
    flags = np.asarray(flags, dtype=bool)
    per_element = smooth_l1(target.flat(), prediction.flat(), beta)

    masked = per_element[flags]
    visible = per_element[~flags]
    l_masked = float(masked.mean()) if masked.size else 0.0
    l_visible = float(visible.mean()) if visible.size else 0.0
    return LossReport(
        l_masked=l_masked,
        l_visible=l_visible,
        l_total=l_masked + VISIBLE_WEIGHT * l_visible,
    )


def reconstruct(
    seq: TokenSequence,
    weights: EncoderWeights,
    decoder: DecoderWeights,
    mask_mode: AttentionMaskMode = "bidirectional",
) -> tuple[PatchGrid, LossReport]:
    """Encode a (masked) sequence, decode patches, and score them.

    Raises:
        InvalidArgumentError: If the sequence does not carry its source patches.
    """
    if seq.grid is None:
        raise InvalidArgumentError("Reconstruction needs the sequence's source patch grid")
    hidden = encoder_forward(seq, weights, mask_mode)
    prediction = decode_patches(hidden, decoder, seq.grid.channels)
    return prediction, masked_loss(seq.grid, prediction, seq.mask_flags)


def init_decoder(cfg: ModelConfig, rng: np.random.Generator, std: float = 0.02) -> DecoderWeights:
    return DecoderWeights(
        w_dec=(rng.standard_normal((cfg.patch_len, cfg.embed_dim)) * std).astype(np.float32),
        b_dec=np.zeros(cfg.patch_len, dtype=np.float32),
    )


__all__ = [
    "SMOOTH_L1_BETA",
    "VISIBLE_WEIGHT",
    "decode_patches",
    "init_decoder",
    "masked_loss",
    "reconstruct",
    "smooth_l1",
]
