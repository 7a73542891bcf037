"""End-to-end preprocessing of one recording."""

from __future__ import annotations

import logging

from src.app.application.signal.filters import apply_filter_chain
from src.app.application.signal.normalize import normalize
from src.app.application.signal.windows import pad_channels, segment_windows
from src.app.domain.config import PreprocessingConfig
from src.app.domain.signal.types import WaveformRecord, Window

logger = logging.getLogger(__name__)


def preprocess_record(record: WaveformRecord, cfg: PreprocessingConfig) -> list[Window]:
    """Filter, normalize, window, and pad a recording.

    With ``normalization_scope="window"`` statistics are taken per window after
    segmentation; with ``"recording"`` the whole filtered record is normalized
    first.

    Raises:
        InvalidSpecError: If a filter cutoff is not below the record's Nyquist.
        InvalidArgumentError: If the record has more channels than the pad target.
    """
    for spec in cfg.filters:
        spec.check_against(record.fs)

    filtered = apply_filter_chain(record, cfg.filters)

    if cfg.normalization_scope == "recording":
        filtered = normalize(filtered, cfg.normalization)
        windows = segment_windows(filtered, cfg.window)
    else:
        windows = [normalize(w, cfg.normalization) for w in segment_windows(filtered, cfg.window)]

    if cfg.pad_channels_to is not None:
        windows = [pad_channels(w, cfg.pad_channels_to) for w in windows]

    logger.info(
        f"Preprocessed {record.channel_count}-channel record at {record.fs} Hz "
        f"into {len(windows)} windows"
    )
    return windows


__all__ = ["preprocess_record"]
