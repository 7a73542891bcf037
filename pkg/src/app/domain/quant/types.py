"""Quantization domain types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from src.app.domain.errors import CalibrationError, InvalidArgumentError
from src.app.domain.model.config import ModelConfig

QuantScheme = Literal["symmetric_weight", "affine_activation", "fixed"]

INT8_MIN = -128
INT8_MAX = 127
SCALE_FLOOR = 1e-8

# Residual-stream grids are 16 bits wide; every kernel operand stays 8 bits.
ACTIVATION_BITS = (8, 16)
PAYLOAD_DTYPES = {8: np.dtype(np.int8), 16: np.dtype(np.int16)}

# i-Softmax output grid: probability p is stored as round(256 p) - 128.
SOFTMAX_OUT_SCALE = 1.0 / 256.0
SOFTMAX_OUT_ZERO_POINT = -128


@dataclass(frozen=True)
class QuantParams:
    """Affine integer grid: real = scale * (q - zero_point).

    ``bits`` is 8 for every weight and kernel operand, 16 for the residual
    stream (``embed`` and the block residual adds).
    """

    scale: float
    zero_point: int = 0
    scheme: QuantScheme = "affine_activation"
    bits: int = 8

    def __post_init__(self) -> None:
        if not self.scale > 0:
            msg = f"Quantization scale must be positive, got {self.scale}"
            raise InvalidArgumentError(msg)
        if self.bits not in ACTIVATION_BITS:
            msg = f"Unsupported grid width {self.bits}; expected one of {ACTIVATION_BITS}"
            raise InvalidArgumentError(msg)
        if not self.qmin <= self.zero_point <= self.qmax:
            msg = f"zero_point {self.zero_point} outside int{self.bits} range"
            raise InvalidArgumentError(msg)
        if self.scheme == "symmetric_weight" and (self.zero_point != 0 or self.bits != 8):
            raise InvalidArgumentError("symmetric weight params need zero_point = 0 on an int8 grid")

    @property
    def qmin(self) -> int:
        return -(1 << (self.bits - 1))

    @property
    def qmax(self) -> int:
        return (1 << (self.bits - 1)) - 1


@dataclass(frozen=True, eq=False)
class QuantizedTensor:
    """Integer payload plus its grid; the payload dtype follows ``qp.bits``.

    ``channel_scales`` is set only for per-channel weights (one scale per
    output row); ``qp.scale`` then holds their maximum.
    """

    data: np.ndarray
    qp: QuantParams
    channel_scales: np.ndarray | None = None

    def __post_init__(self) -> None:
        expected = PAYLOAD_DTYPES[self.qp.bits]
        if self.data.dtype != expected:
            msg = f"QuantizedTensor payload must be {expected} for a {self.qp.bits}-bit grid, got {self.data.dtype}"
            raise InvalidArgumentError(msg)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    def row_scales(self) -> np.ndarray:
        """Per-output-row scales (broadcast of the tensor scale if per-tensor)."""
        if self.channel_scales is not None:
            return self.channel_scales
        return np.full(self.data.shape[0], self.qp.scale, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class QuantizedLinear:
    """int8 weight with an int32 bias on the accumulator grid."""

    weight: QuantizedTensor
    bias: np.ndarray  # int32, scale = s_in * s_w (per row)


@dataclass(frozen=True, eq=False)
class QuantizedBlock:
    ln1_gamma: np.ndarray
    ln1_beta: np.ndarray
    q: QuantizedLinear
    k: QuantizedLinear
    v: QuantizedLinear
    out: QuantizedLinear
    ln2_gamma: np.ndarray
    ln2_beta: np.ndarray
    fc1: QuantizedLinear
    fc2: QuantizedLinear
    gelu_table: np.ndarray  # int8 [256], indexed by q + 128


@dataclass(frozen=True, eq=False)
class QuantizedModel:
    """Calibrated int8 model.

    Only the LayerNorm gamma/beta are full precision; the classifier consumes
    int8 inputs and weights and accumulates to FP32 logits.
    """

    config: ModelConfig
    sites: dict[str, QuantParams]
    patch_proj: QuantizedLinear | None
    blocks: list[QuantizedBlock]
    final_ln_gamma: np.ndarray
    final_ln_beta: np.ndarray
    classifier: QuantizedLinear
    rope_cos: np.ndarray  # int16 Q1.14 [N, d_h / 2]
    rope_sin: np.ndarray
    per_channel: bool = False
    metadata: dict[str, str] = field(default_factory=dict)

    def site(self, name: str) -> QuantParams:
        try:
            return self.sites[name]
        except KeyError:
            msg = f"Activation site '{name}' was not calibrated"
            raise CalibrationError(msg) from None


__all__ = [
    "ACTIVATION_BITS",
    "INT8_MAX",
    "INT8_MIN",
    "PAYLOAD_DTYPES",
    "SCALE_FLOOR",
    "SOFTMAX_OUT_SCALE",
    "SOFTMAX_OUT_ZERO_POINT",
    "QuantParams",
    "QuantScheme",
    "QuantizedBlock",
    "QuantizedLinear",
    "QuantizedModel",
    "QuantizedTensor",
]
