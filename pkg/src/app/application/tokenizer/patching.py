"""Channel-independent patching and its inverse."""

from __future__ import annotations

import numpy as np

from src.app.domain.errors import InvalidArgumentError
from src.app.domain.model.config import ModelConfig
from src.app.domain.model.types import PatchGrid


def patchify(window: np.ndarray, cfg: ModelConfig) -> PatchGrid:
    """Cut a [T, C] window into per-channel patches.

    ``patches[c, i, j] == window[i * S + j, c]``.

    Raises:
        InvalidArgumentError: If the window shape differs from (T, C) of the config.
    """
    window = np.asarray(window, dtype=np.float64)
    expected = (cfg.timesteps, cfg.channels)
    if window.shape != expected:
        msg = f"Window shape {window.shape} does not match config (T, C) = {expected}"
        raise InvalidArgumentError(msg)

    # [T - L + 1, C, L] -> keep every S-th start -> [C, N_p, L]
    views = np.lib.stride_tricks.sliding_window_view(window, cfg.patch_len, axis=0)
    patches = views[:: cfg.patch_stride].transpose(1, 0, 2)
    return PatchGrid(patches=np.ascontiguousarray(patches))


def unpatchify(grid: PatchGrid, stride: int) -> np.ndarray:
    """Scatter patches back into a [T, C] window; later patches win on overlap."""
    c, n_p, length = grid.patches.shape
    total = (n_p - 1) * stride + length
    window = np.zeros((total, c), dtype=grid.patches.dtype)
    for i in range(n_p):
        window[i * stride : i * stride + length, :] = grid.patches[:, i, :].T
    return window


__all__ = ["patchify", "unpatchify"]
