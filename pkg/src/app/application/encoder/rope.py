"""Rotary position embeddings over (2j, 2j+1) pairs."""

from __future__ import annotations

import numpy as np

from src.app.domain.errors import InvalidArgumentError
from src.app.domain.model.config import ModelConfig

DEFAULT_ROPE_BASE = 10000.0


def rope_angles(positions: np.ndarray, d_h: int, base: float = DEFAULT_ROPE_BASE) -> np.ndarray:
    """Rotation angle of every (position, pair): pos * base^(-2j / d_h)."""
    if d_h % 2:
        msg = f"RoPE needs an even head dimension, got {d_h}"
        raise InvalidArgumentError(msg)
    inv_freq = base ** (-np.arange(0, d_h, 2, dtype=np.float64) / d_h)
    return np.asarray(positions, dtype=np.float64)[:, None] * inv_freq[None, :]


def rotate(x: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rotate each (2j, 2j+1) pair of the rows of x by the given angles."""
    cos, sin = np.cos(angles), np.sin(angles)
    even, odd = x[:, 0::2], x[:, 1::2]
    out = np.empty_like(x, dtype=np.float64)
    out[:, 0::2] = even * cos - odd * sin
    out[:, 1::2] = even * sin + odd * cos
    return out


def apply_rope(
    q: np.ndarray,
    k: np.ndarray,
    positions: np.ndarray,
    base: float = DEFAULT_ROPE_BASE,
) -> tuple[np.ndarray, np.ndarray]:
    """Rotate queries and keys of one head, shape [N, d_h]."""
    q = np.asarray(q, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    angles = rope_angles(positions, q.shape[1], base)
    return rotate(q, angles), rotate(k, angles)


def rope_positions(cfg: ModelConfig) -> np.ndarray:
    """Position of every token in channel-major order.

    ``flattened`` uses the token index k = c * N_p + i; ``temporal`` uses the
    patch index i, shared by all channels at the same time step.
    """
    if cfg.rope_positions == "temporal":
        return np.tile(np.arange(cfg.n_patches), cfg.channels)
    return np.arange(cfg.n_tokens)


__all__ = ["DEFAULT_ROPE_BASE", "apply_rope", "rope_angles", "rope_positions", "rotate"]
