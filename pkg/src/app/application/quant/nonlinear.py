"""Integer-only softmax, LayerNorm, and GELU kernels, plus integer RoPE.

i-Softmax uses the integer exp decomposition of I-BERT: after subtracting the
row max, x = -z * ln2 + p with p in (-ln2, 0], exp(p) is a second-order
polynomial a * (p + b)**2 + c evaluated on the integer grid, and 2**-z is a
right shift.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from src.app.application.encoder.functional import gelu
from src.app.application.encoder.rope import DEFAULT_ROPE_BASE, rope_angles
from src.app.application.quant.kernels import (
    multipliers_for,
    quantize_tensor,
    requant_multiplier,
    requantize,
    round_half_away,
)
from src.app.domain.errors import NumericFailureError, ShapeMismatchError
from src.app.domain.quant.types import (
    INT8_MAX,
    INT8_MIN,
    SOFTMAX_OUT_ZERO_POINT,
    QuantizedTensor,
    QuantParams,
)

logger = logging.getLogger(__name__)

# exp(p) ~= a * (p + b)**2 + c on (-ln2, 0]
EXP_POLY_A = 0.3585
EXP_POLY_B = 1.353
EXP_POLY_C = 0.344

SOFTMAX_LEVELS = 256
SOFTMAX_INTERNAL_SCALE = 1e-3
EXP_CUTOFF = 45.0

ROPE_FRAC_BITS = 14
LN_FRAC_BITS = 14
ISQRT_ITERATIONS = 4
LN_MAX_PRECISION_BITS = 10
LN_VARIANCE_BITS = 32


def _rescale_input(q: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    """Re-grid non-positive q so its step lies in (SOFTMAX_INTERNAL_SCALE / 2, SOFTMAX_INTERNAL_SCALE].

    Values below -EXP_CUTOFF in real units are clipped first; their exp is 0 on
    the output grid anyway.
    """
    lower = int(max(-EXP_CUTOFF / scale, -(2.0**62)))
    q = np.maximum(q, lower)
    exponent = math.ceil(math.log2(scale / SOFTMAX_INTERNAL_SCALE))
    if exponent > 0:
        return np.left_shift(q, exponent), scale * 2.0**-exponent
    if exponent < 0:
        return np.right_shift(q, -exponent), scale * 2.0**-exponent
    return q, scale


def i_exp(q: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    """Integer exp of non-positive q on grid ``scale``; returns (values, out scale)."""
    q_ln2 = int(math.floor(math.log(2.0) / scale))
    q_b = int(math.floor(EXP_POLY_B / scale))
    q_c = int(math.floor(EXP_POLY_C / (EXP_POLY_A * scale * scale)))
    z = np.minimum((-q) // q_ln2, 62)
    p = q + z * q_ln2
    poly = (p + q_b) ** 2 + q_c
    return np.right_shift(poly, z), EXP_POLY_A * scale * scale


def i_softmax(
    x: np.ndarray,
    scale: float,
    allowed: np.ndarray | None = None,
) -> np.ndarray:
    """Row-wise softmax from integer logits to int8 probabilities.

    Output code q represents probability (q + 128) / 256. The 256 quanta of a
    row are handed out by largest remainder, so a row sums to exactly 256
    unless one entry saturates at 255.

    Args:
        x: Integer logits (int8 or int32), [..., K].
        scale: Real value of one logit step.
        allowed: Optional boolean mask; disallowed entries get probability 0.

    Returns:
        int8 codes, same shape as ``x``.
    """
    q = np.asarray(x, dtype=np.int64)
    if allowed is not None:
        floor = np.iinfo(np.int64).min // 4
        q = np.where(allowed, q, floor)
    row_max = q.max(axis=-1, keepdims=True)
    centered = q - row_max
    if allowed is not None:
        centered = np.where(allowed, centered, 0)

    centered, internal_scale = _rescale_input(centered, scale)
    exps, _ = i_exp(centered, internal_scale)
    if allowed is not None:
        exps = np.where(allowed, exps, 0)

    total = exps.sum(axis=-1, keepdims=True)
    numer = exps * SOFTMAX_LEVELS
    quanta = numer // total
    remainder = numer - quanta * total
    deficit = SOFTMAX_LEVELS - quanta.sum(axis=-1)

    # stable sort: ties go to the lower index
    order = np.argsort(-remainder, axis=-1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(q.shape[-1]), axis=-1)
    quanta = quanta + (ranks < deficit[..., None])

    codes = np.minimum(quanta, SOFTMAX_LEVELS - 1) + SOFTMAX_OUT_ZERO_POINT
    return codes.astype(np.int8)


def isqrt(v: np.ndarray) -> np.ndarray:
    """floor(sqrt(v)) for positive int64 values.

    Four Newton iterations from a power-of-two seed at or above the root, then
    one floor-correction step; exact for inputs below 2**44.
    """
    v = np.asarray(v, dtype=np.int64)
    _, bits = np.frexp(v.astype(np.float64))
    x = np.left_shift(np.int64(1), ((bits.astype(np.int64) + 1) // 2))
    x = np.maximum(x, 1)
    for _ in range(ISQRT_ITERATIONS):
        x = np.maximum((x + v // x) // 2, 1)
    x = x - (x * x > v)
    x = x + ((x + 1) * (x + 1) <= v)
    return x


def _ln_precision_shift(raw: np.ndarray, n: int) -> int:
    """Shift that brings the largest row variance near 2**LN_VARIANCE_BITS."""
    largest = int(((raw * raw).sum(axis=-1) // n).max()) if raw.size else 0
    return min(LN_MAX_PRECISION_BITS, (LN_VARIANCE_BITS - largest.bit_length()) // 2)


def i_layernorm(
    x: QuantizedTensor,
    gamma: np.ndarray,
    beta: np.ndarray,
    out_qp: QuantParams,
    eps: float = 1e-5,
) -> QuantizedTensor:
    """Row-wise LayerNorm with integer statistics.

    With d = n * x - sum(x), rescaled by a power of two so the largest row
    variance sits near 2**32, V = sum(d**2) // n and eps_int the epsilon on
    the same grid, sigma = isqrt(V + eps_int) and the normalized value is
    d / sigma in Q.14. gamma and beta stay full precision; the affine result is
    requantized. All accumulators are int64.
    """
    q = x.data.astype(np.int64) - x.qp.zero_point
    n = q.shape[-1]
    raw = n * q - q.sum(axis=-1, keepdims=True)
    shift = _ln_precision_shift(raw, n)
    dev = np.left_shift(raw, shift) if shift >= 0 else np.right_shift(raw, -shift)
    variance = (dev * dev).sum(axis=-1, keepdims=True) // n

    eps_grid = eps * float(n) ** 2 * 4.0**shift / x.qp.scale**2
    eps_int = np.int64(max(1, min(int(eps_grid + 0.5), 1 << 61)))
    sigma = isqrt(variance + eps_int)

    numer = np.left_shift(dev, LN_FRAC_BITS)
    normalized = np.where(numer < 0, -1, 1) * ((np.abs(numer) + sigma // 2) // sigma)

    y = normalized.astype(np.float64) / (1 << LN_FRAC_BITS) * gamma + beta
    return quantize_tensor(y, out_qp)


def build_gelu_table(in_qp: QuantParams, out_qp: QuantParams) -> np.ndarray:
    """int8 GELU output for every int8 input code, indexed by q + 128.

    Raises:
        NumericFailureError: If the table decreases on non-negative inputs.
    """
    codes = np.arange(INT8_MIN, INT8_MAX + 1)
    real = in_qp.scale * (codes - in_qp.zero_point)
    table = quantize_tensor(gelu(real), out_qp).data
    non_negative = table[real >= 0].astype(np.int16)
    if np.any(np.diff(non_negative) < 0):
        raise NumericFailureError("GELU table is not monotone on non-negative inputs")
    return table


def i_gelu(x: QuantizedTensor, table: np.ndarray, out_qp: QuantParams) -> QuantizedTensor:
    return QuantizedTensor(data=table[x.data.astype(np.int16) - INT8_MIN], qp=out_qp)


def build_rope_tables(
    positions: np.ndarray, d_h: int, base: float = DEFAULT_ROPE_BASE
) -> tuple[np.ndarray, np.ndarray]:
    """Per-position cos/sin in Q1.14, int16 [N, d_h / 2]."""
    angles = rope_angles(positions, d_h, base)
    one = 1 << ROPE_FRAC_BITS
    cos = round_half_away(np.cos(angles) * one).astype(np.int16)
    sin = round_half_away(np.sin(angles) * one).astype(np.int16)
    return cos, sin


def int_rope(
    x: QuantizedTensor,
    cos_q14: np.ndarray,
    sin_q14: np.ndarray,
    out_qp: QuantParams,
) -> QuantizedTensor:
    """Rotate every (2j, 2j+1) pair with Q1.14 tables and requantize.

    ``x`` holds all heads side by side, [N, heads * d_h]; the tables cover one
    head and are repeated across heads.
    """
    n, width = x.shape
    pairs = cos_q14.shape[1]
    if cos_q14.shape[0] != n or width % (2 * pairs):
        msg = f"RoPE tables {cos_q14.shape} do not fit activations {x.shape}"
        raise ShapeMismatchError(msg)
    reps = width // (2 * pairs)
    cos = np.tile(cos_q14.astype(np.int64), (1, reps))
    sin = np.tile(sin_q14.astype(np.int64), (1, reps))

    centered = x.data.astype(np.int64) - x.qp.zero_point
    even, odd = centered[:, 0::2], centered[:, 1::2]
    acc = np.empty_like(centered)
    acc[:, 0::2] = even * cos - odd * sin
    acc[:, 1::2] = even * sin + odd * cos

    m, shift = requant_multiplier(x.qp.scale / (out_qp.scale * (1 << ROPE_FRAC_BITS)))
    return QuantizedTensor(data=requantize(acc, m, shift, out_qp.zero_point), qp=out_qp)


def requant_audit(ratios: list[float]) -> float:
    """Worst relative error of the multiplier approximation over ``ratios``."""
    if not ratios:
        return 0.0
    m, shift = multipliers_for(np.asarray(ratios))
    approx = m.astype(np.float64) * np.exp2(-shift.astype(np.float64))
    worst = float(np.max(np.abs(approx - ratios) / np.asarray(ratios)))
    logger.info(f"Requantization audit over {len(ratios)} ratios: worst relative error {worst:.3e}")
    return worst


__all__ = [
    "EXP_POLY_A",
    "EXP_POLY_B",
    "EXP_POLY_C",
    "build_gelu_table",
    "build_rope_tables",
    "i_exp",
    "i_gelu",
    "i_layernorm",
    "i_softmax",
    "int_rope",
    "isqrt",
    "requant_audit",
]
