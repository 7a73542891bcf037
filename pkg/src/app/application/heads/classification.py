"""Linear classification head and sliding-window inference."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.app.application.encoder.forward import encoder_forward
from src.app.application.heads.fusion import fuse_and_pool
from src.app.application.signal.windows import window_count
from src.app.application.tokenizer.embedding import embed
from src.app.application.tokenizer.patching import patchify
from src.app.domain.errors import ShapeMismatchError
from src.app.domain.model.config import AttentionMaskMode, FusionMode
from src.app.domain.model.types import (
    ClassifierHead,
    EncoderWeights,
    FusedFeature,
)
from src.app.domain.signal.types import WaveformRecord

logger = logging.getLogger(__name__)

WINDOW_MS = 8000.0
STRIDE_MS = 2000.0


def classify(f: FusedFeature, head: ClassifierHead) -> np.ndarray:
    """Logits W @ f + b."""
    vector = np.asarray(f.vector, dtype=np.float64)
    if vector.shape[0] != head.w.shape[1]:
        msg = f"Feature length {vector.shape[0]} does not match head input {head.w.shape[1]}"
        raise ShapeMismatchError(msg)
    return head.w.astype(np.float64) @ vector + head.b


def init_classifier(
    fused_dim: int, num_classes: int, rng: np.random.Generator, std: float = 0.02
) -> ClassifierHead:
    return ClassifierHead(
        w=(rng.standard_normal((num_classes, fused_dim)) * std).astype(np.float32),
        b=np.zeros(num_classes, dtype=np.float32),
    )


@dataclass(frozen=True, eq=False)
class WindowedLogits:
    """Per-window logits and their mean.

    ``error`` is set (and ``aggregate`` is None) when the stream is shorter than
    one window.
    """

    starts: list[int]
    logits: np.ndarray  # [windows, K]
    aggregate: np.ndarray | None
    error: str | None = None

    @property
    def window_count(self) -> int:
        return len(self.starts)


def window_logits(
    window: np.ndarray,
    weights: EncoderWeights,
    head: ClassifierHead,
    mask: AttentionMaskMode,
    fusion: FusionMode = "concat",
) -> np.ndarray:
    seq = embed(patchify(window, weights.config), weights.tokenizer)
    hidden = encoder_forward(seq, weights, mask)
    return classify(fuse_and_pool(hidden, seq.channel_of, seq.patch_of, fusion), head)


def windowed_inference(
    stream: WaveformRecord,
    weights: EncoderWeights,
    head: ClassifierHead,
    *,
    win_ms: float = WINDOW_MS,
    stride_ms: float = STRIDE_MS,
    mask: AttentionMaskMode = "causal",
    fusion: FusionMode = "concat",
) -> WindowedLogits:
    """Slide a fixed window over a stream and average the logits.

    Raises:
        ShapeMismatchError: If the window length in samples differs from the
            model's timesteps.
    """
    length = int(np.floor(win_ms * stream.fs / 1000.0 + 0.5))
    stride = max(1, int(np.floor(stride_ms * stream.fs / 1000.0 + 0.5)))
    if length != weights.config.timesteps:
        msg = (
            f"{win_ms} ms at {stream.fs} Hz is {length} samples; the model expects "
            f"{weights.config.timesteps}"
        )
        raise ShapeMismatchError(msg)

    count = window_count(stream.length, length, stride)
    if count == 0:
        return WindowedLogits(
            starts=[],
            logits=np.zeros((0, head.num_classes)),
            aggregate=None,
            error=f"stream of {stream.length} samples is shorter than one window of {length}",
        )

    starts = [k * stride for k in range(count)]
    logits = np.stack(
        [window_logits(stream.samples[s : s + length], weights, head, mask, fusion) for s in starts]
    )
    logger.info(f"Windowed inference over {count} windows ({mask} attention)")
    return WindowedLogits(starts=starts, logits=logits, aggregate=logits.mean(axis=0))


__all__ = [
    "STRIDE_MS",
    "WINDOW_MS",
    "WindowedLogits",
    "classify",
    "init_classifier",
    "window_logits",
    "windowed_inference",
]
