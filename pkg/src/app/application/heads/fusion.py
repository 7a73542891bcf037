"""Channel fusion (concatenation or channel mean) and temporal average pooling."""

from __future__ import annotations

import numpy as np

from src.app.domain.errors import InvalidArgumentError, ShapeMismatchError
from src.app.domain.model.config import FusionMode
from src.app.domain.model.types import FusedFeature


def _grid(h: np.ndarray, channel_of: np.ndarray, patch_of: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    channels = int(channel_of.max()) + 1
    n_patches = int(patch_of.max()) + 1
    if h.shape[0] != channels * n_patches:
        msg = f"{h.shape[0]} tokens do not form a {channels} x {n_patches} grid"
        raise ShapeMismatchError(msg)
    grid = np.zeros((n_patches, channels, h.shape[1]), dtype=np.float64)
    grid[patch_of, channel_of] = h
    return grid


def fuse_patches(h: np.ndarray, channel_of: np.ndarray, patch_of: np.ndarray) -> np.ndarray:
    """Per-patch concatenation ``[z_{1,p} || ... || z_{C,p}]``, shape [N_p, C * d_e]."""
    grid = _grid(h, channel_of, patch_of)
    return grid.reshape(grid.shape[0], -1)


def fuse_and_pool(
    h: np.ndarray,
    channel_of: np.ndarray,
    patch_of: np.ndarray,
    fusion: FusionMode = "concat",
) -> FusedFeature:
    """Mean over patches of the fused per-patch features.

    ``concat`` keeps every channel (length C * d_e); ``mean`` averages the
    channels of each patch first (length d_e).
    """
    if fusion == "concat":
        return FusedFeature(vector=fuse_patches(h, channel_of, patch_of).mean(axis=0))
    if fusion == "mean":
        return FusedFeature(vector=_grid(h, channel_of, patch_of).mean(axis=(0, 1)))
    msg = f"Unknown fusion mode '{fusion}'; expected 'concat' or 'mean'"
    raise InvalidArgumentError(msg)


__all__ = ["fuse_and_pool", "fuse_patches"]
