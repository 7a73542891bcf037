"""Reconstruction decoder, channel fusion, and downstream heads."""

from src.app.application.heads.classification import (
    WindowedLogits,
    classify,
    init_classifier,
    windowed_inference,
)
from src.app.application.heads.fusion import fuse_and_pool, fuse_patches
from src.app.application.heads.reconstruction import (
    decode_patches,
    init_decoder,
    masked_loss,
    reconstruct,
    smooth_l1,
)
from src.app.application.heads.regression import (
    depthwise_conv1d,
    init_regression_head,
    pointwise_conv1d,
    regress,
    upsample_linear,
)

__all__ = [
    "WindowedLogits",
    "classify",
    "decode_patches",
    "depthwise_conv1d",
    "fuse_and_pool",
    "fuse_patches",
    "init_classifier",
    "init_decoder",
    "init_regression_head",
    "masked_loss",
    "pointwise_conv1d",
    "reconstruct",
    "regress",
    "smooth_l1",
    "upsample_linear",
]
