"""Tensor containers, model and quantized bundles, waveform files, run configs."""

from __future__ import annotations

import json
import struct
from dataclasses import replace

import numpy as np
import pytest

from src.app.application.heads import init_regression_head
from src.app.application.quant import calibrate, quantize_model, quantized_forward
from src.app.application.tokenizer import embed, patchify
from src.app.domain.config import PRESETS, preset
from src.app.domain.errors import (
    ConfigValidationError,
    ContainerIOError,
    InvalidArgumentError,
    ShapeMismatchError,
)
from src.app.domain.model.config import HeadConfig
from src.app.domain.signal.types import WaveformRecord, Window
from src.app.infrastructure.storage import (
    decode_container,
    encode_container,
    load_container,
    load_model,
    load_quantized,
    load_run_config,
    read_input,
    read_waveform,
    read_windows,
    save_container,
    save_model,
    save_quantized,
    sidecar_path,
    write_recording,
    write_windows,
)


def test_container_bytes_are_deterministic_and_aligned(rng):
    tensors = {"b": rng.standard_normal((3, 5)).astype(np.float32), "a": np.arange(7, dtype=np.int8)}
    data = encode_container(tensors, {"kind": "test", "note": "x"})
    assert data == encode_container(dict(reversed(tensors.items())), {"note": "x", "kind": "test"})
    assert data[:4] == b"TMYO"
    version, header_len = struct.unpack_from("<HI", data, 4)
    assert version == 1
    header = json.loads(data[10 : 10 + header_len])
    assert all(entry["offset"] % 64 == 0 for entry in header["tensors"].values())


def test_container_preserves_dtype_shape_and_metadata(rng):
    tensors = {
        "f32": rng.standard_normal((2, 3)).astype(np.float32),
        "i32": np.array([-1, 2, 3], dtype=np.int32),
        "i16": np.array([[7]], dtype=np.int16),
        "big": np.arange(4, dtype=">f4"),
    }
    decoded, metadata = decode_container(encode_container(tensors, {"fs": "2000.0"}))
    assert metadata == {"fs": "2000.0"}
    for name, array in tensors.items():
        np.testing.assert_array_equal(decoded[name], array)
    assert decoded["i32"].dtype == np.int32
    assert decoded["big"].dtype == np.dtype("<f4")


@pytest.mark.parametrize(
    "data",
    [
        b"",
        b"XXXX" + bytes(20),
        struct.pack("<4sHI", b"TMYO", 9, 2) + b"{}",
        struct.pack("<4sHI", b"TMYO", 1, 5) + b"nope!",
    ],
    ids=["empty", "magic", "version", "header"],
)
def test_malformed_containers_are_io_errors(data):
    with pytest.raises(ContainerIOError) as info:
        decode_container(data)
    assert info.value.exit_code == 2


def test_truncated_payload_is_an_io_error():
    data = encode_container({"x": np.arange(100, dtype=np.float32)})
    with pytest.raises(ContainerIOError, match="truncated"):
        decode_container(data[:-64])


def _raw_container(header: str, payload: bytes) -> bytes:
    encoded = header.encode("utf-8")
    head = struct.pack("<4sHI", b"TMYO", 1, len(encoded)) + encoded
    return head + bytes((-len(head)) % 64) + payload


def _entry(offset: int, nbytes: int = 8) -> str:
    return f'{{"dtype":"<f4","nbytes":{nbytes},"offset":{offset},"shape":[{nbytes // 4}]}}'


def test_hand_built_container_decodes():
    data = _raw_container(f'{{"metadata":{{}},"tensors":{{"a":{_entry(0)},"b":{_entry(64)}}}}}', bytes(128))
    tensors, _ = decode_container(data)
    assert sorted(tensors) == ["a", "b"]


@pytest.mark.parametrize(
    ("tensors", "match"),
    [
        (f'"a":{_entry(-64)}', "negative"),
        (f'"a":{_entry(0, nbytes=-4)}', "negative"),
        (f'"a":{_entry(0, nbytes=16)},"b":{_entry(8)}', "overlap"),
        (f'"a":{_entry(0)},"a":{_entry(64)}', "repeats the key 'a'"),
    ],
    ids=["negative-offset", "negative-size", "overlap", "duplicate-name"],
)
def test_inconsistent_manifests_are_io_errors(tensors, match):
    data = _raw_container(f'{{"metadata":{{}},"tensors":{{{tensors}}}}}', bytes(128))
    with pytest.raises(ContainerIOError, match=match) as info:
        decode_container(data)
    assert info.value.exit_code == 2


def test_unsupported_dtype_is_rejected():
    with pytest.raises(ContainerIOError):
        encode_container({"z": np.zeros(2, dtype=np.complex64)})


def test_missing_file_is_an_io_error(tmp_path):
    with pytest.raises(ContainerIOError):
        load_container(tmp_path / "absent.tmyo")


def test_saving_twice_writes_identical_files(tmp_path, tiny_bundle):
    save_model(tmp_path / "a.tmyo", tiny_bundle)
    save_model(tmp_path / "b.tmyo", tiny_bundle)
    assert (tmp_path / "a.tmyo").read_bytes() == (tmp_path / "b.tmyo").read_bytes()


def test_model_round_trip_keeps_every_head(tmp_path, tiny_config, tiny_bundle, rng):
    regression = init_regression_head(tiny_config, HeadConfig(regression_hidden=6, regression_length=20), rng)
    bundle = replace(tiny_bundle, regression=regression)
    save_model(tmp_path / "m.tmyo", bundle)
    loaded = load_model(tmp_path / "m.tmyo", tiny_config)

    assert loaded.config == tiny_config
    np.testing.assert_array_equal(loaded.weights.blocks[1].w_fc2, bundle.weights.blocks[1].w_fc2)
    np.testing.assert_array_equal(loaded.decoder.w_dec, bundle.decoder.w_dec)
    np.testing.assert_array_equal(loaded.classifier.w, bundle.classifier.w)
    assert loaded.regression.output_length == 20
    assert len(loaded.regression.blocks) == len(regression.blocks)
    np.testing.assert_array_equal(loaded.regression.blocks[0].dw_kernel, regression.blocks[0].dw_kernel)


def test_model_config_mismatch_names_the_field(tmp_path, tiny_config, tiny_bundle):
    save_model(tmp_path / "m.tmyo", tiny_bundle)
    other = tiny_config.model_copy(update={"layers": 3})
    with pytest.raises(ShapeMismatchError, match="layers") as info:
        load_model(tmp_path / "m.tmyo", other)
    assert info.value.exit_code == 4


def test_model_with_wrong_tensor_shape_is_a_mismatch(tmp_path, tiny_bundle):
    save_model(tmp_path / "m.tmyo", tiny_bundle)
    tensors, metadata = load_container(tmp_path / "m.tmyo")
    tensors["blocks.0.w_qkv"] = tensors["blocks.0.w_qkv"][:-1]
    save_container(tmp_path / "bad.tmyo", tensors, metadata)
    with pytest.raises(ShapeMismatchError, match=r"blocks\.0\.w_qkv"):
        load_model(tmp_path / "bad.tmyo")


def test_windows_container_is_not_a_model(tmp_path):
    write_windows(tmp_path / "w.tmyo", [Window(samples=np.zeros((4, 2)), fs=100.0, start=0)], 100.0)
    with pytest.raises(ContainerIOError, match="not an FP32"):
        load_model(tmp_path / "w.tmyo")


def test_quantized_round_trip_reproduces_logits(tmp_path, tiny_config, tiny_bundle, rng):
    weights = tiny_bundle.weights
    seqs = [embed(patchify(rng.standard_normal((12, 2)), tiny_config), weights.tokenizer) for _ in range(4)]
    qm = quantize_model(weights, tiny_bundle.classifier, calibrate(weights, seqs), per_channel=True)

    sidecar = save_quantized(tmp_path / "q.tmyo", qm)
    assert sidecar == sidecar_path(tmp_path / "q.tmyo") == tmp_path / "q.qparams.json"
    loaded = load_quantized(tmp_path / "q.tmyo")
    assert loaded.sites == qm.sites
    assert loaded.sites["embed"].bits == 16
    assert loaded.per_channel
    np.testing.assert_array_equal(loaded.blocks[0].fc1.weight.data, qm.blocks[0].fc1.weight.data)
    np.testing.assert_array_equal(quantized_forward(seqs[0], loaded), quantized_forward(seqs[0], qm))


def test_quantized_model_needs_its_sidecar(tmp_path, tiny_config, tiny_bundle, rng):
    weights = tiny_bundle.weights
    seqs = [embed(patchify(rng.standard_normal((12, 2)), tiny_config), weights.tokenizer)]
    qm = quantize_model(weights, tiny_bundle.classifier, calibrate(weights, seqs))
    sidecar = save_quantized(tmp_path / "q.tmyo", qm)
    sidecar.unlink()
    with pytest.raises(ContainerIOError):
        load_quantized(tmp_path / "q.tmyo")


def test_csv_recording(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("ch0,ch1\n1.0,2.0\n3.0,4.5\n-1,0\n", encoding="utf-8")
    record = read_waveform(path, fs=500.0)
    assert record.fs == 500.0
    np.testing.assert_array_equal(record.samples, [[1.0, 2.0], [3.0, 4.5], [-1.0, 0.0]])


@pytest.mark.parametrize(
    ("text", "error"),
    [
        ("a,b\n1,2\n", ContainerIOError),
        ("ch0,ch1\n1,2\n3\n", ContainerIOError),
        ("ch0\nfoo\n", ContainerIOError),
        ("", ContainerIOError),
    ],
    ids=["header", "ragged", "non-numeric", "empty"],
)
def test_malformed_csv(tmp_path, text, error):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(error):
        read_waveform(path, fs=100.0)


def test_csv_needs_a_sampling_rate(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("ch0\n1\n", encoding="utf-8")
    with pytest.raises(InvalidArgumentError):
        read_waveform(path)


def test_recording_container_keeps_its_rate(tmp_path, rng):
    write_recording(tmp_path / "r.tmyo", WaveformRecord(samples=rng.standard_normal((10, 3)), fs=2000.0))
    record = read_waveform(tmp_path / "r.tmyo")
    assert record.fs == 2000.0
    assert record.samples.shape == (10, 3)
    assert read_waveform(tmp_path / "r.tmyo", fs=1000.0).fs == 1000.0


def test_read_input_dispatches_on_container_kind(tmp_path, rng):
    windows = [Window(samples=rng.standard_normal((4, 2)), fs=250.0, start=s) for s in (0, 2, 4)]
    write_windows(tmp_path / "w.tmyo", windows, 250.0)
    write_recording(tmp_path / "r.tmyo", WaveformRecord(samples=np.zeros((6, 2)), fs=250.0))

    loaded = read_input(tmp_path / "w.tmyo")
    assert [w.start for w in loaded] == [0, 2, 4]
    assert loaded[0].fs == 250.0
    np.testing.assert_allclose(loaded[1].samples, windows[1].samples.astype(np.float32))
    assert isinstance(read_input(tmp_path / "r.tmyo"), WaveformRecord)
    assert len(read_windows(tmp_path / "w.tmyo")) == 3


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_every_preset_validates(name):
    cfg = preset(name)
    assert cfg.seed == 0
    assert cfg.preprocessing.window.length_samples == cfg.model.timesteps


def test_run_config_file_overrides_its_preset(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"preset": "gesture", "seed": 9, "model": {"layers": 2}}), encoding="utf-8")
    cfg = load_run_config(path)
    assert cfg.seed == 9
    assert cfg.model.layers == 2
    assert cfg.preprocessing.normalization == "zscore"


def test_run_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"preset": "pretraining", "model": {"depth": 4}}), encoding="utf-8")
    with pytest.raises(ConfigValidationError) as info:
        load_run_config(path)
    assert "model.depth" in info.value.fields
    assert info.value.exit_code == 3


def test_unknown_preset_is_a_validation_error(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"preset": "nope"}), encoding="utf-8")
    with pytest.raises(ConfigValidationError, match="Unknown preset"):
        load_run_config(path)


def test_run_config_must_be_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ContainerIOError):
        load_run_config(path)
