"""Quantized models: int8 payload container plus a quant-params JSON sidecar.

Scales are written as ``repr`` decimal strings so a reload reproduces the
exact float64 values.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from src.app.domain.errors import ContainerIOError, ShapeMismatchError
from src.app.domain.quant.types import (
    QuantizedBlock,
    QuantizedLinear,
    QuantizedModel,
    QuantizedTensor,
    QuantParams,
)
from src.app.infrastructure.storage.container import load_container, save_container
from src.app.infrastructure.storage.json_codec import read_json, write_json
from src.app.infrastructure.storage.model_codec import check_config, parse_model_config

logger = logging.getLogger(__name__)

INT8_KIND = "int8"
SIDECAR_SUFFIX = ".qparams.json"
LINEAR_NAMES = ("q", "k", "v", "out", "fc1", "fc2")
LN_NAMES = ("ln1_gamma", "ln1_beta", "ln2_gamma", "ln2_beta")


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + SIDECAR_SUFFIX)


def _linears(qm: QuantizedModel) -> dict[str, QuantizedLinear]:
    named = {}
    if qm.patch_proj is not None:
        named["patch_proj"] = qm.patch_proj
    for i, block in enumerate(qm.blocks):
        for name in LINEAR_NAMES:
            named[f"blocks.{i}.{name}"] = getattr(block, name)
    named["classifier"] = qm.classifier
    return named


def _qp_entry(qp: QuantParams) -> dict[str, Any]:
    return {
        "scale": repr(float(qp.scale)),
        "zero_point": int(qp.zero_point),
        "scheme": qp.scheme,
        "bits": int(qp.bits),
    }


def save_quantized(path: str | Path, qm: QuantizedModel) -> Path:
    """Write the int8 container and its sidecar; returns the sidecar path."""
    tensors: dict[str, np.ndarray] = {
        "final_ln.gamma": qm.final_ln_gamma.astype(np.float32),
        "final_ln.beta": qm.final_ln_beta.astype(np.float32),
        "rope.cos": qm.rope_cos.astype(np.int16),
        "rope.sin": qm.rope_sin.astype(np.int16),
    }
    weights: dict[str, Any] = {}
    for name, layer in _linears(qm).items():
        tensors[f"{name}.weight"] = layer.weight.data
        tensors[f"{name}.bias"] = layer.bias.astype(np.int32)
        channel = layer.weight.channel_scales
        weights[name] = {
            **_qp_entry(layer.weight.qp),
            "channel_scales": None if channel is None else [repr(float(s)) for s in channel],
        }
    for i, block in enumerate(qm.blocks):
        tensors[f"blocks.{i}.gelu_table"] = block.gelu_table
        for name in LN_NAMES:
            tensors[f"blocks.{i}.{name}"] = getattr(block, name).astype(np.float32)

    model_config = qm.config.model_dump_json()
    save_container(path, tensors, {"kind": INT8_KIND, "model_config": model_config})
    sidecar = sidecar_path(path)
    write_json(
        sidecar,
        {
            "model_config": json.loads(model_config),
            "per_channel": qm.per_channel,
            "sites": {name: _qp_entry(qp) for name, qp in sorted(qm.sites.items())},
            "weights": weights,
            "metadata": qm.metadata,
        },
    )
    return sidecar


def _qp(entry: dict[str, Any]) -> QuantParams:
    return QuantParams(
        scale=float(entry["scale"]),
        zero_point=int(entry["zero_point"]),
        scheme=entry.get("scheme", "affine_activation"),
        bits=int(entry.get("bits", 8)),
    )


def _tensor(tensors: dict[str, np.ndarray], name: str) -> np.ndarray:
    if name not in tensors:
        msg = f"Quantized container has no tensor '{name}'"
        raise ShapeMismatchError(msg)
    return tensors[name]


def _linear(tensors: dict[str, np.ndarray], weights: dict[str, Any], name: str) -> QuantizedLinear:
    try:
        data, bias, entry = tensors[f"{name}.weight"], tensors[f"{name}.bias"], weights[name]
    except KeyError as exc:
        msg = f"Quantized model lacks layer '{name}' ({exc.args[0]})"
        raise ShapeMismatchError(msg) from None
    channel = entry.get("channel_scales")
    weight = QuantizedTensor(
        data=data.astype(np.int8),
        qp=_qp(entry),
        channel_scales=None if channel is None else np.array([float(s) for s in channel]),
    )
    return QuantizedLinear(weight=weight, bias=bias.astype(np.int32))


def load_quantized(path: str | Path) -> QuantizedModel:
    """Read a container written by ``save_quantized`` together with its sidecar.

    Raises:
        ContainerIOError: If either file is missing, unreadable, or of the wrong kind.
        ShapeMismatchError: If the two files describe different models.
    """
    tensors, metadata = load_container(path)
    if metadata.get("kind") != INT8_KIND:
        msg = f"{path} is not a quantized container (kind={metadata.get('kind')!r})"
        raise ContainerIOError(msg)
    cfg = parse_model_config(metadata)
    side = read_json(sidecar_path(path))
    missing = [key for key in ("model_config", "sites", "weights") if key not in side]
    if missing:
        msg = f"Quant-params sidecar lacks {missing}"
        raise ContainerIOError(msg)
    check_config(cfg, parse_model_config({"model_config": json.dumps(side["model_config"])}))

    weights = side["weights"]
    blocks = []
    for i in range(cfg.layers):
        layers = {name: _linear(tensors, weights, f"blocks.{i}.{name}") for name in LINEAR_NAMES}
        ln = {name: _tensor(tensors, f"blocks.{i}.{name}").astype(np.float32) for name in LN_NAMES}
        blocks.append(
            QuantizedBlock(
                **layers,
                **ln,
                gelu_table=_tensor(tensors, f"blocks.{i}.gelu_table").astype(np.int8),
            )
        )
    qm = QuantizedModel(
        config=cfg,
        sites={name: _qp(entry) for name, entry in side["sites"].items()},
        patch_proj=_linear(tensors, weights, "patch_proj") if "patch_proj" in weights else None,
        blocks=blocks,
        final_ln_gamma=_tensor(tensors, "final_ln.gamma").astype(np.float32),
        final_ln_beta=_tensor(tensors, "final_ln.beta").astype(np.float32),
        classifier=_linear(tensors, weights, "classifier"),
        rope_cos=_tensor(tensors, "rope.cos").astype(np.int16),
        rope_sin=_tensor(tensors, "rope.sin").astype(np.int16),
        per_channel=bool(side.get("per_channel", False)),
        metadata={str(k): str(v) for k, v in side.get("metadata", {}).items()},
    )
    logger.info(f"📂 Loaded quantized {cfg.layers}-block model from {path}")
    return qm


__all__ = ["INT8_KIND", "load_quantized", "save_quantized", "sidecar_path"]
