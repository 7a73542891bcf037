"""Decoder, masked loss, fusion, classifier, windowed inference, regression head."""

from __future__ import annotations

import numpy as np
import pytest

from src.app.application.heads import (
    classify,
    decode_patches,
    depthwise_conv1d,
    fuse_and_pool,
    fuse_patches,
    init_regression_head,
    masked_loss,
    reconstruct,
    regress,
    smooth_l1,
    upsample_linear,
    windowed_inference,
)
from src.app.application.tokenizer import apply_mask, embed, patchify, token_indices
from src.app.domain.errors import InvalidArgumentError
from src.app.domain.model.config import HeadConfig
from src.app.domain.model.types import ClassifierHead, DecoderWeights, FusedFeature, PatchGrid
from src.app.domain.signal.types import WaveformRecord


def test_zero_decoder_emits_its_bias(rng):
    decoder = DecoderWeights(w_dec=np.zeros((4, 8), np.float32), b_dec=np.arange(4, dtype=np.float32))
    grid = decode_patches(rng.standard_normal((6, 8)), decoder, channels=2)
    assert grid.patches.shape == (2, 3, 4)
    np.testing.assert_array_equal(grid.flat(), np.tile(np.arange(4.0), (6, 1)))


def test_identity_decoder_returns_hidden_rows(rng):
    h = rng.standard_normal((6, 4))
    decoder = DecoderWeights(w_dec=np.eye(4, dtype=np.float32), b_dec=np.zeros(4, np.float32))
    np.testing.assert_array_equal(decode_patches(h, decoder, channels=3).flat(), h)


@pytest.mark.parametrize(("a", "b", "expected"), [(1.3, 1.3, 0.0), (1.0, 0.0, 0.5), (2.5, 0.0, 2.0)])
def test_smooth_l1_branches(a, b, expected):
    assert float(smooth_l1(a, b, 1.0)) == pytest.approx(expected)


def test_smooth_l1_needs_positive_beta():
    with pytest.raises(InvalidArgumentError):
        smooth_l1(1.0, 0.0, 0.0)


def _grids(masked_error: float, visible_error: float) -> tuple[PatchGrid, PatchGrid, np.ndarray]:
    target = PatchGrid(patches=np.zeros((2, 2, 3)))
    flags = np.array([True, False, False, True])
    pred = target.flat().copy()
    pred[flags] += masked_error
    pred[~flags] += visible_error
    return target, PatchGrid(patches=pred.reshape(2, 2, 3)), flags


def test_perfect_reconstruction_has_zero_loss():
    target, pred, flags = _grids(0.0, 0.0)
    assert masked_loss(target, pred, flags).l_total == 0.0


def test_masked_residuals_of_half_give_an_eighth():
    report = masked_loss(*_grids(0.5, 0.0))
    assert report.l_masked == pytest.approx(0.125)
    assert report.l_visible == 0.0
    assert report.l_total == pytest.approx(0.125)


def test_visible_error_weighs_a_tenth_of_masked_error():
    on_masked = masked_loss(*_grids(0.7, 0.0)).l_total
    on_visible = masked_loss(*_grids(0.0, 0.7)).l_total
    assert on_visible == pytest.approx(0.1 * on_masked, abs=1e-12)


def test_loss_total_is_masked_plus_tenth_visible(rng):
    target = PatchGrid(patches=rng.standard_normal((3, 4, 5)))
    pred = PatchGrid(patches=target.patches + rng.standard_normal((3, 4, 5)))
    flags = rng.random(12) < 0.5
    flags[0], flags[1] = True, False
    report = masked_loss(target, pred, flags)
    assert report.l_total == pytest.approx(report.l_masked + 0.1 * report.l_visible, abs=1e-9)


def test_no_masked_tokens_reduces_to_a_tenth_of_the_mean(rng):
    target = PatchGrid(patches=rng.standard_normal((2, 3, 4)))
    pred = PatchGrid(patches=target.patches + 3.0 * rng.standard_normal((2, 3, 4)))
    report = masked_loss(target, pred, np.zeros(6, bool))
    expected = float(np.mean(smooth_l1(target.patches, pred.patches)))
    assert report.l_masked == 0.0
    assert report.l_total == pytest.approx(0.1 * expected)


def test_reconstruct_reports_loss_for_a_masked_sequence(tiny_config, tiny_bundle, rng):
    w = tiny_bundle.weights
    seq = apply_mask(embed(patchify(rng.standard_normal((12, 2)), tiny_config), w.tokenizer), 0.5, 3, w.tokenizer)
    prediction, report = reconstruct(seq, w, tiny_bundle.decoder)
    assert prediction.patches.shape == (2, 3, 4)
    assert int(seq.mask_flags.sum()) == 3
    assert report.l_total == pytest.approx(report.l_masked + 0.1 * report.l_visible)
    assert set(report.to_dict()) == {"l_masked", "l_visible", "l_total"}


def test_fusion_of_a_single_patch_is_plain_concatenation():
    channel_of, patch_of = token_indices(3, 1)
    h = np.arange(6.0).reshape(3, 2)
    np.testing.assert_array_equal(fuse_and_pool(h, channel_of, patch_of).vector, np.arange(6.0))


def test_fusion_hand_example():
    channel_of, patch_of = token_indices(2, 2)
    # tokens: (c0,p0)=[1,2] (c0,p1)=[3,4] (c1,p0)=[5,6] (c1,p1)=[7,8]
    h = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]])
    np.testing.assert_array_equal(fuse_patches(h, channel_of, patch_of), [[1, 2, 5, 6], [3, 4, 7, 8]])
    np.testing.assert_array_equal(fuse_and_pool(h, channel_of, patch_of).vector, [2.0, 3.0, 6.0, 7.0])


def test_fusion_is_patch_order_invariant_but_not_channel_order_invariant(rng):
    channel_of, patch_of = token_indices(3, 4)
    h = rng.standard_normal((12, 5))
    base = fuse_and_pool(h, channel_of, patch_of).vector
    shuffled_patches = fuse_and_pool(h, channel_of, (patch_of + 1) % 4).vector
    swapped_channels = fuse_and_pool(h, (channel_of + 1) % 3, patch_of).vector
    np.testing.assert_allclose(shuffled_patches, base, atol=1e-12)
    assert not np.allclose(swapped_channels, base)


def test_constant_tokens_fuse_to_repeated_vector():
    channel_of, patch_of = token_indices(4, 3)
    v = np.array([1.5, -2.0])
    np.testing.assert_allclose(fuse_and_pool(np.tile(v, (12, 1)), channel_of, patch_of).vector, np.tile(v, 4))


def test_mean_fusion_averages_channels_then_patches():
    channel_of, patch_of = token_indices(2, 2)
    h = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]])
    fused = fuse_and_pool(h, channel_of, patch_of, fusion="mean").vector
    np.testing.assert_array_equal(fused, [4.0, 5.0])


def test_mean_fusion_keeps_the_embedding_width_and_ignores_channel_order(rng):
    channel_of, patch_of = token_indices(3, 4)
    h = rng.standard_normal((12, 5))
    fused = fuse_and_pool(h, channel_of, patch_of, fusion="mean").vector
    swapped = fuse_and_pool(h, (channel_of + 1) % 3, patch_of, fusion="mean").vector
    assert fused.shape == (5,)
    np.testing.assert_allclose(fused, h.mean(axis=0), atol=1e-12)
    np.testing.assert_allclose(swapped, fused, atol=1e-12)


def test_concatenation_is_the_default_fusion(rng):
    channel_of, patch_of = token_indices(3, 2)
    h = rng.standard_normal((6, 4))
    default = fuse_and_pool(h, channel_of, patch_of).vector
    np.testing.assert_array_equal(default, fuse_and_pool(h, channel_of, patch_of, fusion="concat").vector)
    assert default.shape == (12,)


def test_unknown_fusion_mode_is_rejected():
    channel_of, patch_of = token_indices(2, 1)
    with pytest.raises(InvalidArgumentError, match="fusion mode"):
        fuse_and_pool(np.zeros((2, 3)), channel_of, patch_of, fusion="max")


def test_zero_classifier_returns_bias():
    head = ClassifierHead(w=np.zeros((3, 4), np.float32), b=np.array([1.0, 2.0, 3.0], np.float32))
    np.testing.assert_array_equal(classify(FusedFeature(vector=np.ones(4)), head), [1.0, 2.0, 3.0])


def test_classifier_matches_matvec_and_bias_shift_keeps_argmax(rng):
    head = ClassifierHead(w=rng.standard_normal((5, 6)).astype(np.float32), b=rng.standard_normal(5).astype(np.float32))
    f = FusedFeature(vector=rng.standard_normal(6))
    expected = [sum(float(head.w[r, j]) * f.vector[j] for j in range(6)) + float(head.b[r]) for r in range(5)]
    logits = classify(f, head)
    np.testing.assert_allclose(logits, expected, atol=1e-6)
    shifted = ClassifierHead(w=head.w, b=head.b + np.float32(4.0))
    assert int(np.argmax(classify(f, shifted))) == int(np.argmax(logits))


def test_orthogonal_rows_pick_the_aligned_class():
    head = ClassifierHead(w=np.array([[0.0, 1.0], [1.0, 0.0]], np.float32), b=np.zeros(2, np.float32))
    assert int(np.argmax(classify(FusedFeature(vector=np.array([2.0, 0.0])), head))) == 1


# windows of 12 samples at 1.5 Hz are exactly 8 s; the 2 s stride is 3 samples
STREAM_FS = 1.5


@pytest.mark.parametrize(("seconds", "starts"), [(8, [0]), (14, [0, 3, 6, 9])])
def test_windowed_inference_window_offsets(tiny_bundle, rng, seconds, starts):
    stream = WaveformRecord(samples=rng.standard_normal((int(seconds * STREAM_FS), 2)), fs=STREAM_FS)
    result = windowed_inference(stream, tiny_bundle.weights, tiny_bundle.classifier)
    assert result.starts == starts
    assert result.logits.shape == (len(starts), 3)
    np.testing.assert_allclose(result.aggregate, result.logits.mean(axis=0))


def test_windowed_inference_on_constant_stream_matches_one_window(tiny_bundle):
    stream = WaveformRecord(samples=np.full((21, 2), 0.3), fs=STREAM_FS)
    result = windowed_inference(stream, tiny_bundle.weights, tiny_bundle.classifier)
    np.testing.assert_allclose(result.aggregate, result.logits[0], atol=1e-12)


def test_windowed_inference_with_mean_fusion_uses_an_embedding_wide_head(tiny_config, tiny_bundle, rng):
    head = ClassifierHead(
        w=rng.standard_normal((3, tiny_config.embed_dim)).astype(np.float32), b=np.zeros(3, np.float32)
    )
    stream = WaveformRecord(samples=rng.standard_normal((18, 2)), fs=STREAM_FS)
    result = windowed_inference(stream, tiny_bundle.weights, head, fusion="mean")
    assert result.starts == [0, 3, 6]
    assert result.logits.shape == (3, 3)


def test_windowed_inference_signals_short_streams(tiny_bundle):
    stream = WaveformRecord(samples=np.zeros((10, 2)), fs=STREAM_FS)
    result = windowed_inference(stream, tiny_bundle.weights, tiny_bundle.classifier)
    assert result.aggregate is None
    assert result.window_count == 0
    assert "shorter" in result.error


def test_upsample_linear_interpolates_endpoints():
    np.testing.assert_allclose(upsample_linear(np.array([[0.0], [1.0]]), 3)[:, 0], [0.0, 0.5, 1.0])


def test_delta_kernel_is_identity(rng):
    x = rng.standard_normal((7, 3))
    kernel = np.tile([0.0, 1.0, 0.0], (3, 1))
    np.testing.assert_allclose(depthwise_conv1d(x, kernel, np.zeros(3)), x)


def test_even_depthwise_kernel_is_rejected():
    with pytest.raises(InvalidArgumentError):
        depthwise_conv1d(np.zeros((4, 2)), np.zeros((2, 4)), np.zeros(2))


def test_zero_regression_head_outputs_zeros(tiny_config, rng):
    head_cfg = HeadConfig(regression_hidden=6, regression_length=20)
    head = init_regression_head(tiny_config, head_cfg, rng, std=0.0)
    channel_of, patch_of = token_indices(2, 3)
    out = regress(rng.standard_normal((6, 8)), head, channel_of, patch_of)
    assert out.shape == (20, 5)
    np.testing.assert_array_equal(out, np.zeros((20, 5)))
