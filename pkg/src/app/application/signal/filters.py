"""Butterworth and notch filter design as cascaded biquads.

Band-pass and high-pass stages are Butterworth designs obtained from the analog
prototype by the bilinear transform with frequency pre-warping; notch stages are
two-pole/two-zero sections parameterized by a quality factor. Every stage is
realized as second-order sections and run forward only from a zero state.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from scipy import signal

from src.app.domain.signal.types import (
    CascadedBiquads,
    FilterSpec,
    WaveformRecord,
)

logger = logging.getLogger(__name__)


def design_butterworth(spec: FilterSpec, fs: float) -> CascadedBiquads | None:
    """Design one filter stage for a sampling rate.

    A band-pass of order n yields n biquads, a high-pass of order n yields
    ceil(n / 2), and a notch yields one biquad per center frequency.

    Args:
        spec: Stage description.
        fs: Sampling rate in Hz.

    Returns:
        The stage as second-order sections, or None when every notch center
        was dropped for lying above Nyquist.

    Raises:
        InvalidSpecError: If a cutoff is not strictly below Nyquist.
    """
    spec.check_against(fs)
    clipped = spec.for_rate(fs)
    if clipped is None:
        logger.warning(f"⚠️ All notch centers {spec.cutoffs_hz} Hz lie above Nyquist at fs={fs}; stage skipped")
        return None
    if clipped is not spec:
        dropped = sorted(set(spec.cutoffs_hz) - set(clipped.cutoffs_hz))
        logger.warning(f"⚠️ Dropped notch centers {dropped} Hz at or above Nyquist (fs={fs})")
    spec = clipped

    if spec.kind == "bandpass":
        sos = signal.butter(
            spec.order, list(spec.cutoffs_hz), btype="bandpass", output="sos", fs=fs
        )
    elif spec.kind == "highpass":
        sos = signal.butter(
            spec.order, spec.cutoffs_hz[0], btype="highpass", output="sos", fs=fs
        )
    else:
        sections = []
        for center in spec.cutoffs_hz:
            b, a = signal.iirnotch(center, spec.notch_q, fs=fs)
            sections.append(signal.tf2sos(b, a))
        sos = np.vstack(sections)

    logger.debug(
        f"Designed {spec.kind} stage {spec.cutoffs_hz} Hz at fs={fs}: "
        f"{sos.shape[0]} sections"
    )
    return CascadedBiquads(sos=np.asarray(sos, dtype=np.float64), fs=fs)


def frequency_response(biquads: CascadedBiquads, freqs_hz: np.ndarray) -> np.ndarray:
    """Complex response of the cascade at the given frequencies (Hz)."""
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    _, response = signal.sosfreqz(biquads.sos, worN=freqs, fs=biquads.fs)
    return response


def apply_filter_chain(
    x: WaveformRecord, chain: Sequence[FilterSpec]
) -> WaveformRecord:
    """Run each stage over every channel, in order, causally from rest.

    An empty chain returns the input record itself.
    """
    if not chain:
        return x

    stages = [design_butterworth(spec, x.fs) for spec in chain]
    samples = x.samples
    for stage in filter(None, stages):
        samples = signal.sosfilt(stage.sos, samples, axis=0)
    return x.replace_samples(samples)


__all__ = ["apply_filter_chain", "design_butterworth", "frequency_response"]
