"""Per-channel normalization."""

from __future__ import annotations

import numpy as np

from src.app.domain.errors import InvalidArgumentError
from src.app.domain.signal.types import NormalizationMode, WaveformRecord


def normalize(x: WaveformRecord, mode: NormalizationMode) -> WaveformRecord:
    """Normalize each channel independently.

    ``minmax_pm1`` maps a channel's range onto [-1, 1]; ``zscore`` removes the
    mean and divides by the population standard deviation; ``none`` returns the
    record unchanged. A constant channel maps to zeros under both scaling modes.
    """
    if mode == "none":
        return x

    samples = x.samples
    lo = samples.min(axis=0)
    hi = samples.max(axis=0)
    constant = hi == lo

    if mode == "minmax_pm1":
        span = np.where(constant, 1.0, hi - lo)
        out = 2.0 * (samples - lo) / span - 1.0
    elif mode == "zscore":
        mean = samples.mean(axis=0)
        std = samples.std(axis=0)
        out = (samples - mean) / np.where(constant, 1.0, std)
    else:
        msg = f"Unknown normalization mode '{mode}'"
        raise InvalidArgumentError(msg)

    out[:, constant] = 0.0
    return x.replace_samples(out)


__all__ = ["normalize"]
