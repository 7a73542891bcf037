"""Signal domain types: waveforms, windows, filter and window specs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.app.domain.errors import InvalidArgumentError, InvalidSpecError

FilterKind = Literal["bandpass", "highpass", "notch"]
NormalizationMode = Literal["minmax_pm1", "zscore", "none"]
NormalizationScope = Literal["window", "recording"]

DEFAULT_NOTCH_Q = 30.0


@dataclass(frozen=True, eq=False)
class WaveformRecord:
    """Multichannel EMG samples.

    Attributes:
        samples: Array of shape [T_total, C]; arbitrary but consistent units.
        fs: Sampling rate in Hz.
    """

    samples: np.ndarray
    fs: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            msg = f"Waveform samples must be 2-D [T, C], got shape {samples.shape}"
            raise InvalidArgumentError(msg)
        if samples.shape[0] < 1 or samples.shape[1] < 1:
            msg = f"Waveform must have T >= 1 and C >= 1, got shape {samples.shape}"
            raise InvalidArgumentError(msg)
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError("Waveform contains non-finite samples")
        if not self.fs > 0:
            msg = f"Sampling rate must be positive, got {self.fs}"
            raise InvalidArgumentError(msg)
        object.__setattr__(self, "samples", samples)

    @property
    def channel_count(self) -> int:
        return int(self.samples.shape[1])

    @property
    def length(self) -> int:
        return int(self.samples.shape[0])

    def replace_samples(self, samples: np.ndarray) -> WaveformRecord:
        """Return a record of the same kind carrying new samples."""
        return WaveformRecord(samples=samples, fs=self.fs)


@dataclass(frozen=True, eq=False)
class Window(WaveformRecord):
    """A fixed-length slice of a recording.

    Attributes:
        start: Index of the first sample in the source recording.
    """

    start: int = field(default=0)

    def replace_samples(self, samples: np.ndarray) -> Window:
        return Window(samples=samples, fs=self.fs, start=self.start)


@dataclass(frozen=True, eq=False)
class CascadedBiquads:
    """Second-order sections, one row ``[b0, b1, b2, a0, a1, a2]`` per biquad."""

    sos: np.ndarray
    fs: float

    @property
    def section_count(self) -> int:
        return int(self.sos.shape[0])


class FilterSpec(BaseModel):
    """One stage of a filter chain.

    ``cutoffs_hz`` holds two edges for a band-pass, one corner for a high-pass,
    and one or more center frequencies for a notch (each yields one biquad).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: FilterKind
    order: int = 4
    cutoffs_hz: tuple[float, ...]
    notch_q: float = Field(default=DEFAULT_NOTCH_Q, gt=0)
    drop_above_nyquist: bool = False

    @field_validator("order")
    @classmethod
    def _check_order(cls, value: int) -> int:
        if value not in (2, 3, 4):
            msg = f"order must be one of 2, 3, 4, got {value}"
            raise ValueError(msg)
        return value

    @model_validator(mode="after")
    def _check_cutoffs(self) -> FilterSpec:
        cutoffs = self.cutoffs_hz
        if any(not c > 0 for c in cutoffs):
            raise ValueError("cutoffs_hz must be strictly positive")
        if self.kind == "bandpass" and (len(cutoffs) != 2 or cutoffs[0] >= cutoffs[1]):
            raise ValueError("bandpass needs two ascending cutoffs")
        if self.kind == "highpass" and len(cutoffs) != 1:
            raise ValueError("highpass needs exactly one cutoff")
        if self.kind == "notch" and len(cutoffs) < 1:
            raise ValueError("notch needs at least one center frequency")
        return self

    def for_rate(self, fs: float) -> FilterSpec | None:
        """This stage at ``fs``: notch centers at or above Nyquist are dropped
        when ``drop_above_nyquist`` is set, and None means nothing is left."""
        if not (self.drop_above_nyquist and self.kind == "notch"):
            return self
        kept = tuple(c for c in self.cutoffs_hz if c < fs / 2.0)
        if not kept:
            return None
        return self if kept == self.cutoffs_hz else self.model_copy(update={"cutoffs_hz": kept})

    def check_against(self, fs: float) -> None:
        """Raise InvalidSpecError unless every kept cutoff lies inside (0, fs/2)."""
        nyquist = fs / 2.0
        spec = self.for_rate(fs)
        for cutoff in spec.cutoffs_hz if spec is not None else ():
            if cutoff >= nyquist:
                msg = (
                    f"{self.kind} cutoff {cutoff} Hz is not below the Nyquist "
                    f"frequency {nyquist} Hz (fs={fs})"
                )
                raise InvalidSpecError(msg)


class WindowSpec(BaseModel):
    """Fixed-length windowing with fractional overlap."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    length_samples: int = Field(ge=1)
    overlap_fraction: float = Field(default=0.0, ge=0.0, lt=1.0)

    @property
    def stride(self) -> int:
        return int(math.floor(self.length_samples * (1.0 - self.overlap_fraction) + 0.5))

    @model_validator(mode="after")
    def _check_stride(self) -> WindowSpec:
        if self.stride < 1:
            msg = (
                f"stride round({self.length_samples} * (1 - {self.overlap_fraction}))"
                " must be at least 1"
            )
            raise ValueError(msg)
        return self


__all__ = [
    "DEFAULT_NOTCH_Q",
    "CascadedBiquads",
    "FilterKind",
    "FilterSpec",
    "NormalizationMode",
    "NormalizationScope",
    "WaveformRecord",
    "Window",
    "WindowSpec",
]
