"""Filter design, normalization, windowing, and the preprocessing pipeline."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from src.app.application.signal import (
    apply_filter_chain,
    design_butterworth,
    frequency_response,
    normalize,
    pad_channels,
    preprocess_record,
    segment_windows,
)
from src.app.domain.config import PreprocessingConfig, preset
from src.app.domain.errors import InvalidArgumentError, InvalidSpecError
from src.app.domain.signal.types import FilterSpec, WaveformRecord, Window, WindowSpec

FS = 2000.0


def _db(biquads, freq: float) -> float:
    return float(20 * np.log10(np.abs(frequency_response(biquads, np.array([freq]))[0])))


def test_bandpass_has_half_power_points_at_its_cutoffs():
    stage = design_butterworth(FilterSpec(kind="bandpass", order=4, cutoffs_hz=(20.0, 450.0)), FS)
    assert stage.section_count == 4
    assert _db(stage, 20.0) == pytest.approx(-3.01, abs=0.5)
    assert _db(stage, 450.0) == pytest.approx(-3.01, abs=0.5)
    assert _db(stage, 100.0) == pytest.approx(0.0, abs=0.1)


def test_bandpass_magnitude_decays_outside_the_passband():
    stage = design_butterworth(FilterSpec(kind="bandpass", order=4, cutoffs_hz=(20.0, 450.0)), FS)
    above = np.abs(frequency_response(stage, np.geomspace(450.0, 990.0, 200)))
    below = np.abs(frequency_response(stage, np.geomspace(0.5, 20.0, 200)))
    assert np.all(np.diff(above) <= 1e-12)
    assert np.all(np.diff(below) >= -1e-12)


def test_narrow_bandpass_passes_a_mid_band_tone():
    fs = 200.0
    spec = FilterSpec(kind="bandpass", order=4, cutoffs_hz=(20.0, 90.0))
    stage = design_butterworth(spec, fs)
    assert _db(stage, 55.0) >= -0.5
    t = np.arange(int(4 * fs)) / fs
    tone = np.sin(2 * np.pi * 55.0 * t)[:, None]
    out = apply_filter_chain(WaveformRecord(samples=tone, fs=fs), [spec]).samples
    steady = slice(int(2 * fs), None)
    assert np.max(np.abs(out[steady])) == pytest.approx(1.0, rel=0.1)


def test_highpass_section_count_is_half_the_order_rounded_up():
    stage = design_butterworth(FilterSpec(kind="highpass", order=3, cutoffs_hz=(2.0,)), 1000.0)
    assert stage.section_count == 2


def test_notch_removes_a_steady_tone():
    spec = FilterSpec(kind="notch", cutoffs_hz=(50.0,))
    t = np.arange(int(2 * FS)) / FS
    tone = np.sin(2 * np.pi * 50.0 * t)[:, None]
    out = apply_filter_chain(WaveformRecord(samples=tone, fs=FS), [spec]).samples
    tail = slice(int(1.5 * FS), None)
    attenuation = 20 * np.log10(np.sqrt(np.mean(out[tail] ** 2)) / np.sqrt(np.mean(tone[tail] ** 2)))
    assert attenuation <= -30.0
    assert _db(design_butterworth(spec, FS), 50.0) < -60.0


def test_notch_cascade_has_one_section_per_center():
    spec = FilterSpec(kind="notch", cutoffs_hz=(50.0, 100.0, 150.0))
    assert design_butterworth(spec, FS).section_count == 3


def test_cutoff_at_or_above_nyquist_is_rejected():
    with pytest.raises(InvalidSpecError):
        design_butterworth(FilterSpec(kind="bandpass", order=4, cutoffs_hz=(20.0, 450.0)), 800.0)
    with pytest.raises(InvalidSpecError):
        design_butterworth(FilterSpec(kind="notch", cutoffs_hz=(60.0, 300.0)), 500.0)


def test_notch_centers_above_nyquist_can_be_dropped():
    spec = FilterSpec(
        kind="notch", cutoffs_hz=tuple(60.0 * k for k in range(1, 7)), drop_above_nyquist=True
    )
    assert design_butterworth(spec, 500.0).section_count == 4
    assert design_butterworth(spec, 1000.0).section_count == 6
    assert design_butterworth(spec, 100.0) is None

    x = np.random.default_rng(0).standard_normal((50, 2))
    out = apply_filter_chain(WaveformRecord(samples=x, fs=100.0), [spec])
    np.testing.assert_array_equal(out.samples, x)


def test_invalid_filter_specs_fail_validation():
    with pytest.raises(ValueError):
        FilterSpec(kind="bandpass", order=5, cutoffs_hz=(20.0, 450.0))
    with pytest.raises(ValueError):
        FilterSpec(kind="bandpass", cutoffs_hz=(450.0, 20.0))
    with pytest.raises(ValueError):
        FilterSpec(kind="highpass", cutoffs_hz=(-1.0,))


def test_filter_chain_is_linear():
    gen = np.random.default_rng(3)
    chain = [
        FilterSpec(kind="bandpass", order=4, cutoffs_hz=(20.0, 450.0)),
        FilterSpec(kind="notch", cutoffs_hz=(50.0,)),
    ]
    x, y = gen.standard_normal((2, 4000, 3))

    def run(samples: np.ndarray) -> np.ndarray:
        return apply_filter_chain(WaveformRecord(samples=samples, fs=FS), chain).samples

    combined = run(2.5 * x - 0.75 * y)
    separate = 2.5 * run(x) - 0.75 * run(y)
    np.testing.assert_allclose(combined, separate, rtol=1e-9, atol=1e-9)


def test_empty_chain_returns_the_input():
    record = WaveformRecord(samples=np.ones((10, 1)), fs=FS)
    assert apply_filter_chain(record, []) is record


def test_minmax_maps_range_onto_plus_minus_one():
    out = normalize(WaveformRecord(samples=np.array([[0.0], [5.0], [10.0]]), fs=FS), "minmax_pm1")
    np.testing.assert_allclose(out.samples[:, 0], [-1.0, 0.0, 1.0])


def test_zscore_of_constant_channel_is_zero():
    out = normalize(WaveformRecord(samples=np.ones((3, 1)), fs=FS), "zscore")
    np.testing.assert_array_equal(out.samples, np.zeros((3, 1)))


def test_zscore_has_zero_mean_and_unit_population_std():
    out = normalize(WaveformRecord(samples=np.array([[2.0], [4.0], [6.0]]), fs=FS), "zscore")
    assert out.samples.mean() == pytest.approx(0.0, abs=1e-15)
    assert out.samples.std() == pytest.approx(1.0, abs=1e-15)


def test_normalize_none_is_identity():
    record = WaveformRecord(samples=np.arange(6.0).reshape(3, 2), fs=FS)
    assert normalize(record, "none") is record


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, (16, 3), elements=st.floats(-1e3, 1e3)),
    st.floats(0.01, 100.0),
    st.floats(-100.0, 100.0),
)
def test_minmax_ignores_positive_affine_rescaling(samples, scale, shift):
    base = normalize(WaveformRecord(samples=samples, fs=FS), "minmax_pm1").samples
    moved = normalize(WaveformRecord(samples=samples * scale + shift, fs=FS), "minmax_pm1").samples
    spans = samples.max(axis=0) - samples.min(axis=0)
    wide = spans > 1.0
    np.testing.assert_allclose(moved[:, wide], base[:, wide], atol=1e-9)


@pytest.mark.parametrize(
    ("total", "length", "overlap", "starts"),
    [
        (2000, 1000, 0.5, [0, 500, 1000]),
        (1000, 1000, 0.0, [0]),
        (999, 1000, 0.0, []),
    ],
)
def test_segment_windows_counts_and_starts(total, length, overlap, starts):
    record = WaveformRecord(samples=np.zeros((total, 2)), fs=FS)
    spec = WindowSpec(length_samples=length, overlap_fraction=overlap)
    assert [w.start for w in segment_windows(record, spec)] == starts


def test_windows_are_direct_slices():
    samples = np.random.default_rng(1).standard_normal((1234, 3))
    windows = segment_windows(
        WaveformRecord(samples=samples, fs=FS), WindowSpec(length_samples=200, overlap_fraction=0.25)
    )
    assert len(windows) == (1234 - 200) // 150 + 1
    for w in windows:
        np.testing.assert_array_equal(w.samples, samples[w.start : w.start + 200])


def test_pad_channels_appends_zero_channels():
    window = Window(samples=np.ones((5, 8)), fs=FS)
    padded = pad_channels(window, 10)
    np.testing.assert_array_equal(padded.samples.sum(axis=0), [5.0] * 8 + [0.0, 0.0])
    assert pad_channels(padded, 10) is padded


def test_pad_channels_rejects_too_many_channels():
    with pytest.raises(InvalidArgumentError):
        pad_channels(Window(samples=np.ones((5, 17)), fs=FS), 16)


def test_waveform_rejects_non_finite_samples():
    with pytest.raises(InvalidArgumentError):
        WaveformRecord(samples=np.array([[1.0], [np.nan]]), fs=FS)


def test_pretraining_pipeline_windows_two_seconds_into_seven():
    record = WaveformRecord(samples=np.random.default_rng(2).standard_normal((4000, 8)), fs=FS)
    windows = preprocess_record(record, preset("pretraining").preprocessing)
    assert len(windows) == 7
    assert all(w.samples.shape == (1000, 16) for w in windows)
    assert all(np.all(w.samples[:, 8:] == 0.0) for w in windows)
    assert all(w.samples[:, :8].min() == pytest.approx(-1.0) for w in windows)


def test_recording_scope_normalizes_before_segmenting():
    cfg = PreprocessingConfig(
        window=WindowSpec(length_samples=100),
        normalization="minmax_pm1",
        normalization_scope="recording",
    )
    samples = np.linspace(0.0, 1.0, 400)[:, None]
    windows = preprocess_record(WaveformRecord(samples=samples, fs=FS), cfg)
    assert windows[0].samples[0, 0] == pytest.approx(-1.0)
    assert windows[0].samples[-1, 0] < 0.0
    assert windows[-1].samples[-1, 0] == pytest.approx(1.0)


def test_speech_style_preset_runs_below_the_highest_harmonic():
    cfg = preset("speech_style").preprocessing
    record = WaveformRecord(samples=np.random.default_rng(4).standard_normal((2000, 4)), fs=500.0)
    windows = preprocess_record(record, cfg)
    assert len(windows) == 2
    assert all(np.isfinite(w.samples).all() for w in windows)
