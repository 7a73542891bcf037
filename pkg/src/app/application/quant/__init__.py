"""Post-training int8 quantization and the integer-only execution path."""

from src.app.application.quant.calibration import MinMaxObserver, calibrate
from src.app.application.quant.forward import quantized_forward, quantized_forward_patches
from src.app.application.quant.kernels import (
    dequantize,
    int_add_requant,
    int_matmul_requant,
    quantize_tensor,
    requant_multiplier,
    requantize,
)
from src.app.application.quant.model import quantize_model
from src.app.application.quant.nonlinear import (
    build_gelu_table,
    build_rope_tables,
    i_gelu,
    i_layernorm,
    i_softmax,
    int_rope,
)

__all__ = [
    "MinMaxObserver",
    "build_gelu_table",
    "build_rope_tables",
    "calibrate",
    "dequantize",
    "i_gelu",
    "i_layernorm",
    "i_softmax",
    "int_add_requant",
    "int_matmul_requant",
    "int_rope",
    "quantize_model",
    "quantize_tensor",
    "quantized_forward",
    "quantized_forward_patches",
    "requant_multiplier",
    "requantize",
]
