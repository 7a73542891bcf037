"""Fixed-length windowing and channel zero-padding."""

from __future__ import annotations

import logging

import numpy as np

from src.app.domain.errors import InvalidArgumentError
from src.app.domain.signal.types import WaveformRecord, Window, WindowSpec

logger = logging.getLogger(__name__)


def window_count(total: int, length: int, stride: int) -> int:
    if total < length:
        return 0
    return (total - length) // stride + 1


def segment_windows(x: WaveformRecord, w: WindowSpec) -> list[Window]:
    """Cut a record into windows ``[k * stride, k * stride + length)``.

    The trailing partial window is dropped; a record shorter than one window
    yields an empty list.
    """
    length = w.length_samples
    stride = w.stride
    count = window_count(x.length, length, stride)
    if count == 0:
        logger.info(
            f"Record of {x.length} samples is shorter than one {length}-sample window"
        )
        return []

    windows = [
        Window(samples=x.samples[k * stride : k * stride + length], fs=x.fs, start=k * stride)
        for k in range(count)
    ]
    logger.info(f"Segmented {x.length} samples into {count} windows (stride {stride})")
    return windows


def pad_channels(x: Window, target_c: int) -> Window:
    """Append all-zero channels up to ``target_c``.

    Raises:
        InvalidArgumentError: If the window already has more channels.
    """
    if x.channel_count > target_c:
        msg = f"Window has {x.channel_count} channels, more than the target {target_c}"
        raise InvalidArgumentError(msg)
    if x.channel_count == target_c:
        return x
    padded = np.pad(x.samples, ((0, 0), (0, target_c - x.channel_count)))
    return x.replace_samples(padded)


__all__ = ["pad_channels", "segment_windows", "window_count"]
