"""FP32 weight bundles to and from the tensor container."""

from __future__ import annotations

import logging
from dataclasses import fields
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.app.domain.errors import ConfigValidationError, ContainerIOError, ShapeMismatchError
from src.app.domain.model.config import ModelConfig
from src.app.domain.model.types import (
    BlockWeights,
    ClassifierHead,
    DecoderWeights,
    EncoderWeights,
    ModelBundle,
    RegressionBlock,
    RegressionHead,
    TokenizerWeights,
)
from src.app.infrastructure.storage.container import load_container, save_container

logger = logging.getLogger(__name__)

FP32_KIND = "fp32"
BLOCK_FIELDS = tuple(f.name for f in fields(BlockWeights))
REGRESSION_BLOCK_FIELDS = tuple(f.name for f in fields(RegressionBlock))


def _f32(array: np.ndarray) -> np.ndarray:
    return np.asarray(array, dtype=np.float32)


def bundle_to_tensors(bundle: ModelBundle) -> dict[str, np.ndarray]:
    w = bundle.weights
    tensors = {
        "tokenizer.w_proj": w.tokenizer.w_proj,
        "tokenizer.b_proj": w.tokenizer.b_proj,
        "tokenizer.mask_token": w.tokenizer.mask_token,
        "final_ln.gamma": w.final_ln_gamma,
        "final_ln.beta": w.final_ln_beta,
    }
    for i, block in enumerate(w.blocks):
        for name in BLOCK_FIELDS:
            tensors[f"blocks.{i}.{name}"] = getattr(block, name)
    if bundle.decoder is not None:
        tensors["decoder.w"] = bundle.decoder.w_dec
        tensors["decoder.b"] = bundle.decoder.b_dec
    if bundle.classifier is not None:
        tensors["classifier.w"] = bundle.classifier.w
        tensors["classifier.b"] = bundle.classifier.b
    if (reg := bundle.regression) is not None:
        tensors |= {
            "regression.w_in": reg.w_in,
            "regression.b_in": reg.b_in,
            "regression.w_out": reg.w_out,
            "regression.b_out": reg.b_out,
        }
        for i, block in enumerate(reg.blocks):
            for name in REGRESSION_BLOCK_FIELDS:
                tensors[f"regression.blocks.{i}.{name}"] = getattr(block, name)
    return {name: _f32(array) for name, array in tensors.items()}


def save_model(path: str | Path, bundle: ModelBundle) -> None:
    metadata = {"kind": FP32_KIND, "model_config": bundle.config.model_dump_json()}
    if bundle.regression is not None:
        metadata["regression_length"] = str(bundle.regression.output_length)
    save_container(path, bundle_to_tensors(bundle), metadata)


class _TensorReader:
    """Pops named tensors and checks their shapes."""

    def __init__(self, tensors: dict[str, np.ndarray]) -> None:
        self.tensors = tensors

    def has(self, name: str) -> bool:
        return name in self.tensors

    def take(self, name: str, shape: tuple[int, ...] | None = None) -> np.ndarray:
        if name not in self.tensors:
            msg = f"Container has no tensor '{name}'"
            raise ShapeMismatchError(msg)
        array = self.tensors[name]
        if shape is not None and tuple(array.shape) != shape:
            msg = f"Tensor '{name}' has shape {tuple(array.shape)}, config expects {shape}"
            raise ShapeMismatchError(msg)
        return _f32(array)


def parse_model_config(metadata: dict[str, str]) -> ModelConfig:
    if "model_config" not in metadata:
        raise ContainerIOError("Container metadata lacks model_config")
    try:
        return ModelConfig.model_validate_json(metadata["model_config"])
    except ValidationError as exc:
        msg = f"Stored model_config is invalid: {exc}"
        raise ConfigValidationError(msg, fields=["model_config"]) from exc


def check_config(stored: ModelConfig, expected: ModelConfig | None) -> None:
    """Raise ShapeMismatchError naming every field where the configs differ."""
    if expected is None or stored == expected:
        return
    a, b = stored.model_dump(), expected.model_dump()
    diffs = [f"{key}: weights {a[key]!r} vs config {b[key]!r}" for key in a if a[key] != b[key]]
    msg = "Weights do not match the model config (" + "; ".join(diffs) + ")"
    raise ShapeMismatchError(msg)


def _read_encoder(reader: _TensorReader, cfg: ModelConfig) -> EncoderWeights:
    d, m, length = cfg.embed_dim, cfg.mlp_dim, cfg.patch_len
    block_shapes = {
        "ln1_gamma": (d,), "ln1_beta": (d,), "w_qkv": (3 * d, d), "b_qkv": (3 * d,),
        "w_out": (d, d), "b_out": (d,), "ln2_gamma": (d,), "ln2_beta": (d,),
        "w_fc1": (m, d), "b_fc1": (m,), "w_fc2": (d, m), "b_fc2": (d,),
    }
    blocks = [
        BlockWeights(**{name: reader.take(f"blocks.{i}.{name}", block_shapes[name]) for name in BLOCK_FIELDS})
        for i in range(cfg.layers)
    ]
    if reader.has(f"blocks.{cfg.layers}.w_qkv"):
        msg = f"Container holds more than the configured {cfg.layers} blocks"
        raise ShapeMismatchError(msg)
    return EncoderWeights(
        config=cfg,
        tokenizer=TokenizerWeights(
            w_proj=reader.take("tokenizer.w_proj", (d, length)),
            b_proj=reader.take("tokenizer.b_proj", (d,)),
            mask_token=reader.take("tokenizer.mask_token", (d,)),
        ),
        blocks=blocks,
        final_ln_gamma=reader.take("final_ln.gamma", (d,)),
        final_ln_beta=reader.take("final_ln.beta", (d,)),
    )


def _read_regression(reader: _TensorReader, cfg: ModelConfig, metadata: dict[str, str]) -> RegressionHead:
    w_in = reader.take("regression.w_in")
    if w_in.ndim != 2 or w_in.shape[1] != cfg.fused_dim:
        msg = f"Regression input {w_in.shape} does not match C * d_e = {cfg.fused_dim}"
        raise ShapeMismatchError(msg)
    h = w_in.shape[0]
    blocks = []
    i = 0
    while reader.has(f"regression.blocks.{i}.dw_kernel"):
        kernel = reader.take(f"regression.blocks.{i}.dw_kernel")
        blocks.append(
            RegressionBlock(
                dw_kernel=kernel,
                dw_bias=reader.take(f"regression.blocks.{i}.dw_bias", (h,)),
                pw_weight=reader.take(f"regression.blocks.{i}.pw_weight", (h, h)),
                pw_bias=reader.take(f"regression.blocks.{i}.pw_bias", (h,)),
            )
        )
        i += 1
    w_out = reader.take("regression.w_out")
    return RegressionHead(
        w_in=w_in,
        b_in=reader.take("regression.b_in", (h,)),
        blocks=blocks,
        w_out=w_out,
        b_out=reader.take("regression.b_out", (w_out.shape[0],)),
        output_length=int(metadata.get("regression_length", cfg.timesteps)),
    )


def load_model(path: str | Path, expected: ModelConfig | None = None) -> ModelBundle:
    """Load an FP32 bundle, checking every shape against the stored config.

    Raises:
        ContainerIOError: If the file is unreadable or not an FP32 container.
        ShapeMismatchError: If ``expected`` differs from the stored config or a
            tensor has the wrong shape.
    """
    tensors, metadata = load_container(path)
    if metadata.get("kind") != FP32_KIND:
        msg = f"{path} is not an FP32 weight container (kind={metadata.get('kind')!r})"
        raise ContainerIOError(msg)
    cfg = parse_model_config(metadata)
    check_config(cfg, expected)

    reader = _TensorReader(tensors)
    weights = _read_encoder(reader, cfg)
    decoder = classifier = regression = None
    if reader.has("decoder.w"):
        decoder = DecoderWeights(
            w_dec=reader.take("decoder.w", (cfg.patch_len, cfg.embed_dim)),
            b_dec=reader.take("decoder.b", (cfg.patch_len,)),
        )
    if reader.has("classifier.w"):
        w = reader.take("classifier.w")
        if w.ndim != 2 or w.shape[1] != cfg.fused_dim:
            msg = f"Classifier weight {w.shape} does not match C * d_e = {cfg.fused_dim}"
            raise ShapeMismatchError(msg)
        classifier = ClassifierHead(w=w, b=reader.take("classifier.b", (w.shape[0],)))
    if reader.has("regression.w_in"):
        regression = _read_regression(reader, cfg, metadata)
    logger.info(f"📂 Loaded {cfg.layers}-block model from {path}")
    return ModelBundle(weights=weights, decoder=decoder, classifier=classifier, regression=regression)


__all__ = [
    "FP32_KIND",
    "bundle_to_tensors",
    "check_config",
    "load_model",
    "parse_model_config",
    "save_model",
]
