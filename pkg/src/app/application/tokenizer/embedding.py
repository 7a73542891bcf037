"""Shared patch projection, mask-token substitution, and tokenizer init."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from src.app.domain.errors import InvalidArgumentError
from src.app.domain.model.config import ModelConfig
from src.app.domain.model.types import PatchGrid, TokenizerWeights, TokenSequence


def token_indices(channels: int, n_patches: int) -> tuple[np.ndarray, np.ndarray]:
    """(channel_of, patch_of) for channel-major order k = c * N_p + i."""
    channel_of = np.repeat(np.arange(channels), n_patches)
    patch_of = np.tile(np.arange(n_patches), channels)
    return channel_of, patch_of


def embed(grid: PatchGrid, w: TokenizerWeights) -> TokenSequence:
    """Project every patch with the shared linear map.

    ``embeddings[c * N_p + i] = W_proj @ patch(c, i) + b_proj``; no token is masked.
    """
    if grid.patch_len != w.w_proj.shape[1]:
        msg = (
            f"Patch length {grid.patch_len} does not match projection input "
            f"{w.w_proj.shape[1]}"
        )
        raise InvalidArgumentError(msg)

    flat = grid.flat().astype(np.float64)
    embeddings = flat @ w.w_proj.astype(np.float64).T + w.b_proj.astype(np.float64)
    channel_of, patch_of = token_indices(grid.channels, grid.n_patches)
    return TokenSequence(
        embeddings=embeddings,
        mask_flags=np.zeros(embeddings.shape[0], dtype=bool),
        channel_of=channel_of,
        patch_of=patch_of,
        grid=grid,
    )


def mask_count(ratio: float, n_tokens: int) -> int:
    """round(ratio * N), halves rounded up."""
    return int(math.floor(ratio * n_tokens + 0.5))


def sample_mask(n_tokens: int, count: int, rng_seed: int) -> np.ndarray:
    """Boolean mask of ``count`` positions drawn without replacement.

    Partial Fisher-Yates shuffle driven by a PCG64 generator, so the same seed
    selects the same positions on every platform.
    """
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    order = np.arange(n_tokens)
    for i in range(count):
        j = int(rng.integers(i, n_tokens))
        order[i], order[j] = order[j], order[i]
    flags = np.zeros(n_tokens, dtype=bool)
    flags[order[:count]] = True
    return flags


def apply_mask(
    seq: TokenSequence, ratio: float, rng_seed: int, w: TokenizerWeights
) -> TokenSequence:
    """Replace round(ratio * N) uniformly chosen tokens with the mask token.

    Raises:
        InvalidArgumentError: If ratio is outside [0, 1).
    """
    if not 0.0 <= ratio < 1.0:
        msg = f"Mask ratio must lie in [0, 1), got {ratio}"
        raise InvalidArgumentError(msg)

    count = mask_count(ratio, seq.n_tokens)
    if count == 0:
        return seq

    flags = sample_mask(seq.n_tokens, count, rng_seed)
    embeddings = seq.embeddings.copy()
    embeddings[flags] = w.mask_token
    return replace(seq, embeddings=embeddings, mask_flags=flags | seq.mask_flags)


def init_tokenizer_weights(
    cfg: ModelConfig, rng: np.random.Generator, std: float = 0.02
) -> TokenizerWeights:
    d, length = cfg.embed_dim, cfg.patch_len
    return TokenizerWeights(
        w_proj=(rng.standard_normal((d, length)) * std).astype(np.float32),
        b_proj=np.zeros(d, dtype=np.float32),
        mask_token=(rng.standard_normal(d) * std).astype(np.float32),
    )


__all__ = [
    "apply_mask",
    "embed",
    "init_tokenizer_weights",
    "mask_count",
    "sample_mask",
    "token_indices",
]
