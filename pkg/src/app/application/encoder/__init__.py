"""FP32 reference transformer encoder."""

from src.app.application.encoder.attention import ActivationObserver, causal_mask, mhsa
from src.app.application.encoder.forward import encoder_forward
from src.app.application.encoder.functional import gelu, layer_norm, softmax
from src.app.application.encoder.params import (
    count_parameters,
    expected_parameters,
    init_encoder_weights,
)
from src.app.application.encoder.rope import apply_rope, rope_positions

__all__ = [
    "ActivationObserver",
    "apply_rope",
    "causal_mask",
    "count_parameters",
    "encoder_forward",
    "expected_parameters",
    "gelu",
    "init_encoder_weights",
    "layer_norm",
    "mhsa",
    "rope_positions",
    "softmax",
]
