"""Convolutional regression head over the temporal patch axis."""

from __future__ import annotations

import numpy as np

from src.app.application.encoder.functional import gelu
from src.app.application.heads.fusion import fuse_patches
from src.app.domain.errors import InvalidArgumentError
from src.app.domain.model.config import HeadConfig, ModelConfig
from src.app.domain.model.types import RegressionBlock, RegressionHead


def pointwise_conv1d(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Kernel-size-1 convolution: [T, C_in] -> [T, C_out]."""
    return np.asarray(x, dtype=np.float64) @ weight.astype(np.float64).T + bias


def depthwise_conv1d(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Per-channel cross-correlation with zero "same" padding.

    Args:
        x: Input, [T, C].
        kernel: One odd-length kernel per channel, [C, k].
        bias: [C].
    """
    k = kernel.shape[1]
    if k % 2 == 0:
        msg = f"Depthwise kernel length must be odd, got {k}"
        raise InvalidArgumentError(msg)
    x = np.asarray(x, dtype=np.float64)
    half = k // 2
    padded = np.pad(x, ((half, half), (0, 0)))
    out = np.zeros_like(x)
    for j in range(k):
        out += padded[j : j + x.shape[0]] * kernel[:, j]
    return out + bias


def upsample_linear(y: np.ndarray, length: int) -> np.ndarray:
    """Linearly interpolate [T_in, D] to [length, D], endpoints aligned."""
    y = np.asarray(y, dtype=np.float64)
    t_in = y.shape[0]
    if t_in == 1:
        return np.repeat(y, length, axis=0)
    src = np.arange(t_in, dtype=np.float64)
    dst = np.linspace(0.0, t_in - 1, length)
    return np.stack([np.interp(dst, src, y[:, j]) for j in range(y.shape[1])], axis=1)


def regress(
    h: np.ndarray,
    head: RegressionHead,
    channel_of: np.ndarray,
    patch_of: np.ndarray,
) -> np.ndarray:
    """Trajectories [T_out, outputs] from encoder hidden states."""
    z = gelu(pointwise_conv1d(fuse_patches(h, channel_of, patch_of), head.w_in, head.b_in))
    for block in head.blocks:
        z = depthwise_conv1d(z, block.dw_kernel, block.dw_bias)
        z = gelu(pointwise_conv1d(z, block.pw_weight, block.pw_bias))
    y = pointwise_conv1d(z, head.w_out, head.b_out)
    return upsample_linear(y, head.output_length)


def init_regression_head(
    cfg: ModelConfig, head_cfg: HeadConfig, rng: np.random.Generator, std: float = 0.02
) -> RegressionHead:
    h, k = head_cfg.regression_hidden, head_cfg.regression_kernel

    def normal(*shape: int) -> np.ndarray:
        return (rng.standard_normal(shape) * std).astype(np.float32)

    blocks = [
        RegressionBlock(
            dw_kernel=normal(h, k),
            dw_bias=np.zeros(h, dtype=np.float32),
            pw_weight=normal(h, h),
            pw_bias=np.zeros(h, dtype=np.float32),
        )
        for _ in range(head_cfg.regression_blocks)
    ]
    return RegressionHead(
        w_in=normal(h, cfg.fused_dim),
        b_in=np.zeros(h, dtype=np.float32),
        blocks=blocks,
        w_out=normal(head_cfg.regression_outputs, h),
        b_out=np.zeros(head_cfg.regression_outputs, dtype=np.float32),
        output_length=head_cfg.regression_length,
    )


__all__ = [
    "depthwise_conv1d",
    "init_regression_head",
    "pointwise_conv1d",
    "regress",
    "upsample_linear",
]
