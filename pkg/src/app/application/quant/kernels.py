"""Affine integer grids, integer requantization, and integer GEMM kernels.

Rounding is half away from zero everywhere. Real-valued rescale ratios are
carried as an int32-range multiplier ``m`` and a right shift ``s`` with
``ratio ~= m * 2**-s``.
"""

from __future__ import annotations

import math

import numpy as np

from src.app.domain.errors import InvalidArgumentError, NumericFailureError, ShapeMismatchError
from src.app.domain.quant.types import (
    INT8_MAX,
    PAYLOAD_DTYPES,
    SCALE_FLOOR,
    QuantizedLinear,
    QuantizedTensor,
    QuantParams,
)

MULTIPLIER_BITS = 31
MAX_SHIFT = 62
MAX_INNER_DIM = 1 << 15


def round_half_away(x: np.ndarray | float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def saturate_int8(x: np.ndarray) -> np.ndarray:
    return saturate(x, 8)


def saturate(x: np.ndarray, bits: int = 8) -> np.ndarray:
    """Clamp onto a signed grid of the given width, in its payload dtype."""
    low, high = -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    return np.clip(x, low, high).astype(PAYLOAD_DTYPES[bits])


def activation_qparams(rmin: float, rmax: float, bits: int = 8) -> QuantParams:
    """Affine grid covering [rmin, rmax] widened to include zero."""
    rmin, rmax = min(float(rmin), 0.0), max(float(rmax), 0.0)
    qmin, qmax = -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    scale = max((rmax - rmin) / (qmax - qmin), SCALE_FLOOR)
    zero_point = int(np.clip(round_half_away(qmin - rmin / scale), qmin, qmax))
    return QuantParams(scale=scale, zero_point=zero_point, scheme="affine_activation", bits=bits)


def weight_qparams(w: np.ndarray) -> QuantParams:
    """Per-tensor symmetric grid from the max-abs weight."""
    max_abs = float(np.max(np.abs(w))) if np.size(w) else 0.0
    return QuantParams(scale=max(max_abs / INT8_MAX, SCALE_FLOOR), zero_point=0, scheme="symmetric_weight")


def quantize_tensor(x: np.ndarray, qp: QuantParams) -> QuantizedTensor:
    """q = clamp(round(x / scale) + zero_point, -128, 127)."""
    q = round_half_away(np.asarray(x, dtype=np.float64) / qp.scale) + qp.zero_point
    return QuantizedTensor(data=saturate(q, qp.bits), qp=qp)


def quantize_weight(w: np.ndarray, per_channel: bool = False) -> QuantizedTensor:
    """Symmetric int8 weight; one scale per output row when ``per_channel``."""
    w = np.asarray(w, dtype=np.float64)
    if not per_channel:
        return quantize_tensor(w, weight_qparams(w))
    row_scales = np.maximum(np.max(np.abs(w), axis=1) / INT8_MAX, SCALE_FLOOR)
    q = saturate_int8(round_half_away(w / row_scales[:, None]))
    qp = QuantParams(scale=float(row_scales.max()), zero_point=0, scheme="symmetric_weight")
    return QuantizedTensor(data=q, qp=qp, channel_scales=row_scales)


def dequantize(qt: QuantizedTensor) -> np.ndarray:
    centered = qt.data.astype(np.float64) - qt.qp.zero_point
    if qt.channel_scales is not None:
        return centered * qt.channel_scales.reshape((-1,) + (1,) * (qt.data.ndim - 1))
    return centered * qt.qp.scale


def requant_multiplier(ratio: float) -> tuple[int, int]:
    """Integer (m, shift) with m * 2**-shift approximating a positive ratio.

    m has 31 significant bits, so the relative error is at most 2**-31 unless
    the ratio is too small to represent within a 62-bit shift.
    """
    if not ratio > 0 or not math.isfinite(ratio):
        msg = f"Requantization ratio must be positive and finite, got {ratio}"
        raise NumericFailureError(msg)
    mantissa, exponent = math.frexp(ratio)
    m = int(round_half_away(mantissa * (1 << MULTIPLIER_BITS)))
    if m == 1 << MULTIPLIER_BITS:
        m //= 2
        exponent += 1
    shift = MULTIPLIER_BITS - exponent
    if shift < 0:
        msg = f"Requantization ratio {ratio} is too large for a 31-bit multiplier"
        raise NumericFailureError(msg)
    if shift > MAX_SHIFT:
        m = int(round_half_away(ratio * 2.0**MAX_SHIFT))
        shift = MAX_SHIFT
    return m, shift


def rounding_shift(x: np.ndarray, shift: np.ndarray | int) -> np.ndarray:
    """Arithmetic right shift of int64 values, rounding half away from zero."""
    x = np.asarray(x, dtype=np.int64)
    shift = np.asarray(shift, dtype=np.int64)
    half = np.where(shift > 0, np.left_shift(np.int64(1), np.maximum(shift - 1, 0)), 0)
    magnitude = np.right_shift(np.abs(x) + half, shift)
    return np.where(x < 0, -magnitude, magnitude)


def requantize(
    acc: np.ndarray,
    m: np.ndarray | int,
    shift: np.ndarray | int,
    zero_point: int,
    bits: int = 8,
) -> np.ndarray:
    """Scale an integer accumulator onto an int8 (or int16) grid."""
    scaled = rounding_shift(np.asarray(acc, dtype=np.int64) * np.asarray(m, dtype=np.int64), shift)
    return saturate(scaled + zero_point, bits)


def multipliers_for(ratios: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pairs = [requant_multiplier(float(r)) for r in np.atleast_1d(ratios)]
    return (
        np.array([p[0] for p in pairs], dtype=np.int64),
        np.array([p[1] for p in pairs], dtype=np.int64),
    )


def _check_inner(k: int) -> None:
    if k > MAX_INNER_DIM:
        msg = f"Inner dimension {k} exceeds {MAX_INNER_DIM}; the int32 accumulator could overflow"
        raise ShapeMismatchError(msg)


def int_matmul(a: np.ndarray, za: int, b: np.ndarray, zb: int) -> np.ndarray:
    """Exact integer product of zero-point-centered operands (int64 result)."""
    if a.shape[-1] != b.shape[0]:
        msg = f"Inner dimensions disagree: {a.shape} @ {b.shape}"
        raise ShapeMismatchError(msg)
    _check_inner(a.shape[-1])
    return (a.astype(np.int64) - za) @ (b.astype(np.int64) - zb)


def int_matmul_requant(
    a: QuantizedTensor, b: QuantizedTensor, out_qp: QuantParams
) -> QuantizedTensor:
    """int8 x int8 -> int32 accumulate -> requantize to ``out_qp``."""
    acc = int_matmul(a.data, a.qp.zero_point, b.data, b.qp.zero_point)
    m, shift = requant_multiplier(a.qp.scale * b.qp.scale / out_qp.scale)
    return QuantizedTensor(data=requantize(acc, m, shift, out_qp.zero_point, out_qp.bits), qp=out_qp)


def quantize_bias(bias: np.ndarray, input_scale: float, weight: QuantizedTensor) -> np.ndarray:
    """int32 bias on the accumulator grid s_in * s_w (per output row)."""
    acc_scales = input_scale * weight.row_scales()
    q = round_half_away(np.asarray(bias, dtype=np.float64) / acc_scales)
    return np.clip(q, np.iinfo(np.int32).min, np.iinfo(np.int32).max).astype(np.int32)


def linear_accumulate(x: QuantizedTensor, layer: QuantizedLinear) -> np.ndarray:
    """int32 accumulator of x @ W^T + bias, as int64."""
    acc = int_matmul(x.data, x.qp.zero_point, layer.weight.data.T, 0)
    return acc + layer.bias.astype(np.int64)


def int_linear(x: QuantizedTensor, layer: QuantizedLinear, out_qp: QuantParams) -> QuantizedTensor:
    """Quantized linear layer with per-row requantization."""
    acc = linear_accumulate(x, layer)
    ratios = x.qp.scale * layer.weight.row_scales() / out_qp.scale
    m, shift = multipliers_for(ratios)
    return QuantizedTensor(data=requantize(acc, m, shift, out_qp.zero_point, out_qp.bits), qp=out_qp)


def int_add_requant(a: QuantizedTensor, b: QuantizedTensor, out_qp: QuantParams) -> QuantizedTensor:
    """Residual add of two int8 tensors on different grids.

    Both rescale ratios share one shift chosen from the larger ratio, so the sum
    is formed in a single int64 accumulator before the rounding shift.
    """
    if a.shape != b.shape:
        msg = f"Residual operands differ in shape: {a.shape} vs {b.shape}"
        raise ShapeMismatchError(msg)
    ratio_a = a.qp.scale / out_qp.scale
    ratio_b = b.qp.scale / out_qp.scale
    _, exponent = math.frexp(max(ratio_a, ratio_b))
    shift = min(MULTIPLIER_BITS - exponent, MAX_SHIFT)
    if shift < 0:
        msg = f"Residual rescale ratio {max(ratio_a, ratio_b)} is too large"
        raise NumericFailureError(msg)
    ma = int(round_half_away(ratio_a * 2.0**shift))
    mb = int(round_half_away(ratio_b * 2.0**shift))
    acc = (a.data.astype(np.int64) - a.qp.zero_point) * ma + (
        b.data.astype(np.int64) - b.qp.zero_point
    ) * mb
    out = rounding_shift(acc, shift) + out_qp.zero_point
    return QuantizedTensor(data=saturate(out, out_qp.bits), qp=out_qp)


def check_ratio(ratio: float) -> float:
    """Relative error of the (m, shift) approximation of ``ratio``."""
    if not ratio > 0:
        msg = f"ratio must be positive, got {ratio}"
        raise InvalidArgumentError(msg)
    m, shift = requant_multiplier(ratio)
    return abs(m * 2.0**-shift - ratio) / ratio


__all__ = [
    "activation_qparams",
    "check_ratio",
    "dequantize",
    "int_add_requant",
    "int_linear",
    "int_matmul",
    "int_matmul_requant",
    "linear_accumulate",
    "multipliers_for",
    "quantize_bias",
    "quantize_tensor",
    "quantize_weight",
    "requant_multiplier",
    "requantize",
    "round_half_away",
    "rounding_shift",
    "saturate",
    "saturate_int8",
    "weight_qparams",
]
