"""EMG preprocessing: filtering, normalization, windowing, channel padding."""

from src.app.application.signal.filters import (
    apply_filter_chain,
    design_butterworth,
    frequency_response,
)
from src.app.application.signal.normalize import normalize
from src.app.application.signal.pipeline import preprocess_record
from src.app.application.signal.windows import pad_channels, segment_windows

__all__ = [
    "apply_filter_chain",
    "design_butterworth",
    "frequency_response",
    "normalize",
    "pad_channels",
    "preprocess_record",
    "segment_windows",
]
