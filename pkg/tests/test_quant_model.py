"""Calibration and the integer-only forward pass against the FP32 reference."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from src.app.application.encoder import encoder_forward, init_encoder_weights
from src.app.application.heads import classify, fuse_and_pool, init_classifier
from src.app.application.quant import (
    MinMaxObserver,
    calibrate,
    quantize_model,
    quantized_forward,
    quantized_forward_patches,
)
from src.app.application.tokenizer import embed, patchify
from src.app.domain.errors import (
    CalibrationError,
    InvalidArgumentError,
    NumericFailureError,
    ShapeMismatchError,
)


def _sequences(cfg, weights, seed: int, count: int):
    rng = np.random.Generator(np.random.PCG64(seed))
    return [
        embed(patchify(rng.standard_normal((cfg.timesteps, cfg.channels)), cfg), weights.tokenizer)
        for _ in range(count)
    ]


def _fp_logits(seq, weights, head):
    hidden = encoder_forward(seq, weights, "bidirectional")
    return classify(fuse_and_pool(hidden, seq.channel_of, seq.patch_of), head)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


@pytest.fixture
def desk_model(desk_config):
    weights = init_encoder_weights(desk_config, seed=11)
    head = init_classifier(desk_config.fused_dim, 8, np.random.Generator(np.random.PCG64(12)), std=0.5)
    return weights, head


@pytest.mark.slow
def test_integer_path_agrees_with_fp32(desk_config, desk_model):
    weights, head = desk_model
    sites = calibrate(weights, _sequences(desk_config, weights, seed=100, count=200))
    qm = quantize_model(weights, head, sites)

    agree, cosines = 0, []
    evaluation = _sequences(desk_config, weights, seed=200, count=500)
    for seq in evaluation:
        reference = _fp_logits(seq, weights, head)
        logits = quantized_forward(seq, qm)
        assert logits.dtype == np.float32
        agree += int(np.argmax(logits) == np.argmax(reference))
        cosines.append(_cosine(logits.astype(np.float64), reference))

    assert agree / len(evaluation) >= 0.98
    assert np.median(cosines) >= 0.99


@pytest.mark.slow
def test_integer_patch_projection_tracks_fp_embedding_path(desk_config, desk_model):
    weights, head = desk_model
    sites = calibrate(weights, _sequences(desk_config, weights, seed=300, count=100))
    qm = quantize_model(weights, head, sites, per_channel=True)
    assert qm.patch_proj is not None

    cosines = [
        _cosine(quantized_forward_patches(seq.grid, qm).astype(np.float64), _fp_logits(seq, weights, head))
        for seq in _sequences(desk_config, weights, seed=400, count=50)
    ]
    assert np.median(cosines) >= 0.98


def test_calibration_covers_every_block_site(tiny_config, tiny_bundle):
    sites = calibrate(tiny_bundle.weights, _sequences(tiny_config, tiny_bundle.weights, seed=1, count=4))
    for name in ("embed", "final_ln", "patches", "blocks.0.ln1", "blocks.1.res2", "blocks.1.gelu"):
        assert name in sites
    assert all(qp.scheme == "affine_activation" for qp in sites.values())


def test_residual_stream_sites_are_sixteen_bits_wide(tiny_config, tiny_bundle):
    sites = calibrate(tiny_bundle.weights, _sequences(tiny_config, tiny_bundle.weights, seed=7, count=3))
    wide = {name for name, qp in sites.items() if qp.bits == 16}
    assert wide == {"embed", "blocks.0.res1", "blocks.0.res2", "blocks.1.res1", "blocks.1.res2"}
    assert sites["final_ln"].bits == 8


def test_calibration_without_patch_grids_blocks_the_patch_path(tiny_config, tiny_bundle):
    weights = tiny_bundle.weights
    seqs = _sequences(tiny_config, weights, seed=2, count=3)
    sites = calibrate(weights, [replace(seq, grid=None) for seq in seqs])
    qm = quantize_model(weights, tiny_bundle.classifier, sites)
    assert "patches" not in sites
    assert qm.patch_proj is None
    assert quantized_forward(seqs[0], qm).shape == (3,)
    with pytest.raises(CalibrationError):
        quantized_forward_patches(seqs[0].grid, qm)


def test_missing_site_is_a_calibration_error(tiny_config, tiny_bundle):
    weights = tiny_bundle.weights
    sites = calibrate(weights, _sequences(tiny_config, weights, seed=3, count=2))
    del sites["blocks.0.fc1"]
    with pytest.raises(CalibrationError):
        quantize_model(weights, tiny_bundle.classifier, sites)


def test_empty_calibration_set_is_rejected(tiny_bundle):
    with pytest.raises(InvalidArgumentError):
        calibrate(tiny_bundle.weights, [])


def test_observer_rejects_non_finite_activations():
    observer = MinMaxObserver()
    observer.update("x", np.array([1.0, -2.0]))
    observer.update("x", np.array([3.0]))
    assert observer.range_of("x") == (-2.0, 3.0)
    with pytest.raises(NumericFailureError):
        observer.update("x", np.array([np.nan]))


def test_quantized_forward_checks_sequence_shape(tiny_config, tiny_bundle, desk_config):
    weights = tiny_bundle.weights
    sites = calibrate(weights, _sequences(tiny_config, weights, seed=4, count=2))
    qm = quantize_model(weights, tiny_bundle.classifier, sites)
    other = init_encoder_weights(desk_config, seed=1)
    with pytest.raises(ShapeMismatchError):
        quantized_forward(_sequences(desk_config, other, seed=5, count=1)[0], qm)


def test_classifier_must_fit_the_encoder(tiny_config, tiny_bundle, rng):
    weights = tiny_bundle.weights
    sites = calibrate(weights, _sequences(tiny_config, weights, seed=6, count=2))
    with pytest.raises(ShapeMismatchError):
        quantize_model(weights, init_classifier(tiny_config.fused_dim + 1, 3, rng), sites)
