"""Multi-head self-attention with rotary positions."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from src.app.application.encoder.functional import softmax
from src.app.application.encoder.rope import DEFAULT_ROPE_BASE, rope_angles, rotate
from src.app.domain.model.config import AttentionMaskMode
from src.app.domain.model.types import BlockWeights

ActivationObserver = Callable[[str, np.ndarray], None]


def causal_mask(n: int) -> np.ndarray:
    """True where a query may attend, i.e. key index <= query index."""
    return np.tril(np.ones((n, n), dtype=bool))


def mhsa(
    x: np.ndarray,
    w: BlockWeights,
    mask: AttentionMaskMode,
    positions: np.ndarray,
    *,
    heads: int,
    rope_base: float = DEFAULT_ROPE_BASE,
    observe: ActivationObserver | None = None,
    prefix: str = "",
) -> np.ndarray:
    """Scaled dot-product attention per head, RoPE on queries and keys.

    Args:
        x: Normalized input, [N, d_e].
        w: Block weights (fused QKV and output projection are used).
        mask: ``causal`` hides keys after the query.
        positions: RoPE position per token, [N].
        heads: Number of heads; d_e must divide evenly.
        rope_base: Rotary base.
        observe: Optional callback receiving named intermediates.
        prefix: Site-name prefix passed to ``observe``.

    Returns:
        Attention output after the output projection, [N, d_e].
    """
    n, d = x.shape
    d_h = d // heads
    qkv = x @ w.w_qkv.astype(np.float64).T + w.b_qkv
    q, k, v = qkv[:, :d], qkv[:, d : 2 * d], qkv[:, 2 * d :]

    angles = rope_angles(positions, d_h, rope_base)
    q_rot = np.empty_like(q)
    k_rot = np.empty_like(k)
    for h in range(heads):
        cols = slice(h * d_h, (h + 1) * d_h)
        q_rot[:, cols] = rotate(q[:, cols], angles)
        k_rot[:, cols] = rotate(k[:, cols], angles)

    allowed = causal_mask(n) if mask == "causal" else None
    context = np.empty_like(v)
    scale = 1.0 / np.sqrt(d_h)
    for h in range(heads):
        cols = slice(h * d_h, (h + 1) * d_h)
        scores = (q_rot[:, cols] @ k_rot[:, cols].T) * scale
        if allowed is not None:
            scores = np.where(allowed, scores, -np.inf)
        context[:, cols] = softmax(scores, axis=-1) @ v[:, cols]

    out = context @ w.w_out.astype(np.float64).T + w.b_out

    if observe is not None:
        for site, value in (
            ("q", q),
            ("k", k),
            ("v", v),
            ("q_rot", q_rot),
            ("k_rot", k_rot),
            ("attn", context),
            ("proj", out),
        ):
            observe(f"{prefix}{site}", value)
    return out


__all__ = ["ActivationObserver", "causal_mask", "mhsa"]
