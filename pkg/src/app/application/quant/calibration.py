"""Min/max activation calibration over a set of token sequences."""

from __future__ import annotations

import logging
from collections.abc import Iterable

import numpy as np

from src.app.application.encoder.forward import encoder_forward
from src.app.application.quant.kernels import activation_qparams
from src.app.domain.errors import InvalidArgumentError, NumericFailureError
from src.app.domain.model.config import AttentionMaskMode
from src.app.domain.model.types import EncoderWeights, TokenSequence
from src.app.domain.quant.types import QuantParams

logger = logging.getLogger(__name__)

PATCH_SITE = "patches"
RESIDUAL_BITS = 16


def site_bits(name: str) -> int:
    """Grid width of a site: the residual stream is 16 bits, everything else 8."""
    if name == "embed" or name.endswith((".res1", ".res2")):
        return RESIDUAL_BITS
    return 8


class MinMaxObserver:
    """Running min/max per named activation site.

    Single writer: ``update`` mutates the observer, ``qparams`` snapshots it.
    """

    def __init__(self) -> None:
        self._ranges: dict[str, tuple[float, float]] = {}

    def update(self, name: str, array: np.ndarray) -> None:
        values = np.asarray(array, dtype=np.float64)
        if values.size == 0:
            return
        low, high = float(values.min()), float(values.max())
        if not (np.isfinite(low) and np.isfinite(high)):
            msg = f"Non-finite activations observed at site '{name}'"
            raise NumericFailureError(msg)
        if name in self._ranges:
            old_low, old_high = self._ranges[name]
            low, high = min(low, old_low), max(high, old_high)
        self._ranges[name] = (low, high)

    @property
    def sites(self) -> list[str]:
        return sorted(self._ranges)

    def range_of(self, name: str) -> tuple[float, float]:
        return self._ranges[name]

    def qparams(self) -> dict[str, QuantParams]:
        return {
            name: activation_qparams(*self._ranges[name], bits=site_bits(name)) for name in self.sites
        }


def calibrate(
    model: EncoderWeights,
    calib_set: Iterable[TokenSequence],
    mask: AttentionMaskMode = "bidirectional",
) -> dict[str, QuantParams]:
    """Affine params for every activation site of the encoder.

    Residual-stream sites get 16-bit grids; every other site is int8.

    Sequences that still carry their patch grid also calibrate the ``patches``
    site, which the integer patch projection needs.

    Raises:
        InvalidArgumentError: If ``calib_set`` is empty.
    """
    observer = MinMaxObserver()
    count = 0
    for seq in calib_set:
        if seq.grid is not None:
            observer.update(PATCH_SITE, seq.grid.flat())
        encoder_forward(seq, model, mask, observer=observer.update)
        count += 1

    if count == 0:
        raise InvalidArgumentError("Calibration set is empty")

    sites = observer.qparams()
    logger.info(f"📏 Calibrated {len(sites)} activation sites over {count} sequences")
    return sites


__all__ = ["PATCH_SITE", "RESIDUAL_BITS", "MinMaxObserver", "calibrate", "site_bits"]
