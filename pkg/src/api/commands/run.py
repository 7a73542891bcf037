"""``tinymyo run``: encoder plus one head over every window of an input."""

from __future__ import annotations

import argparse
import asyncio
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
from injector import Injector

from src.api.commands.common import (
    add_config_arguments,
    add_output_argument,
    as_float32,
    check_windows,
    config_was_given,
    emit,
    load_windows,
)
from src.app.application.encoder import encoder_forward
from src.app.application.heads import classify, fuse_and_pool, reconstruct, regress
from src.app.application.quant import quantized_forward_patches
from src.app.application.tokenizer import apply_mask, embed, patchify
from src.app.domain.config import RunConfig
from src.app.domain.errors import EXIT_OK, InvalidArgumentError, ShapeMismatchError
from src.app.domain.model.config import AttentionMaskMode, ModelConfig
from src.app.domain.model.types import ModelBundle
from src.app.domain.quant.types import QuantizedModel
from src.app.domain.signal.types import Window
from src.app.infrastructure.storage import load_model, load_quantized
from src.app.infrastructure.storage.model_codec import check_config

logger = logging.getLogger(__name__)

HELP = "Run the encoder and a head over every window of an input"
HEADS = ("classification", "reconstruction", "regression")

WindowFn = Callable[[int, Window], dict[str, Any]]


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("weights", type=Path, help="FP32 model container, or int8 with --quantized")
    parser.add_argument("input", type=Path, help="Windows container, recording container, or CSV")
    parser.add_argument("--fs", type=float, help="Sampling rate in Hz (required for CSV)")
    parser.add_argument(
        "--quantized", action="store_true", help="Weights are an int8 container; run the integer path (also set by quantization.enabled)"
    )
    parser.add_argument(
        "--mask-mode",
        choices=("bidirectional", "causal"),
        help="Attention mask (default: the config's attention setting)",
    )
    parser.add_argument("--head", choices=HEADS, default="classification")
    add_config_arguments(parser)
    add_output_argument(parser)


def _need(head: Any, name: str) -> Any:
    if head is None:
        msg = f"The model container has no {name} head"
        raise ShapeMismatchError(msg)
    return head


def _fp32_fn(bundle: ModelBundle, head: str, mask: AttentionMaskMode, config: RunConfig) -> WindowFn:
    weights, cfg = bundle.weights, bundle.config

    if head == "classification":
        classifier = _need(bundle.classifier, "classification")

        def run_window(index: int, window: Window) -> dict[str, Any]:
            seq = embed(patchify(window.samples, cfg), weights.tokenizer)
            hidden = encoder_forward(seq, weights, mask)
            return {"logits": classify(fuse_and_pool(hidden, seq.channel_of, seq.patch_of), classifier)}

    elif head == "reconstruction":
        decoder = _need(bundle.decoder, "reconstruction")

        def run_window(index: int, window: Window) -> dict[str, Any]:
            seq = embed(patchify(window.samples, cfg), weights.tokenizer)
            masked = apply_mask(seq, config.mask.ratio, config.seed + index, weights.tokenizer)
            _, loss = reconstruct(masked, weights, decoder, mask)
            return {"loss": loss.to_dict(), "masked_tokens": int(masked.mask_flags.sum())}

    else:
        regression = _need(bundle.regression, "regression")

        def run_window(index: int, window: Window) -> dict[str, Any]:
            seq = embed(patchify(window.samples, cfg), weights.tokenizer)
            hidden = encoder_forward(seq, weights, mask)
            return {"trajectory": regress(hidden, regression, seq.channel_of, seq.patch_of)}

    return run_window


def _int8_fn(qm: QuantizedModel, head: str, mask: AttentionMaskMode) -> WindowFn:
    if head != "classification":
        msg = f"The integer path only serves the classification head, not {head}"
        raise InvalidArgumentError(msg)

    def run_window(index: int, window: Window) -> dict[str, Any]:
        return {"logits": quantized_forward_patches(patchify(window.samples, qm.config), qm, mask)}

    return run_window


async def _gather(fn: WindowFn, windows: list[Window]) -> list[dict[str, Any]]:
    # gather keeps submission order, so results line up with window indices
    return await asyncio.gather(*(asyncio.to_thread(fn, i, w) for i, w in enumerate(windows)))


def _summarize(head: str, results: list[dict[str, Any]]) -> dict[str, Any]:
    if head == "classification":
        mean = np.mean([r["logits"] for r in results], axis=0)
        return {"aggregate_logits": as_float32(mean), "predicted_class": int(np.argmax(mean))}
    if head == "reconstruction":
        keys = ("l_masked", "l_visible", "l_total")
        return {
            "mean_loss": {k: as_float32(np.mean([r["loss"][k] for r in results])) for k in keys}
        }
    return {}


def _serializable(result: dict[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in result.items():
        if isinstance(value, dict):
            out[key] = {k: as_float32(v) for k, v in value.items()}
        elif isinstance(value, np.ndarray):
            out[key] = as_float32(value)
        else:
            out[key] = value
    return out


def handle(args: argparse.Namespace, injector: Injector) -> int:
    config = injector.get(RunConfig)
    expected: ModelConfig | None = config.model if config_was_given(args) else None
    mask: AttentionMaskMode = args.mask_mode or config.attention
    quantized = args.quantized or config.quantization.enabled

    if quantized:
        qm = load_quantized(args.weights)
        check_config(qm.config, expected)
        model_cfg, fn = qm.config, _int8_fn(qm, args.head, mask)
    else:
        bundle = load_model(args.weights, expected)
        model_cfg, fn = bundle.config, _fp32_fn(bundle, args.head, mask, config)

    windows = load_windows(args.input, config, args.fs)
    check_windows(windows, model_cfg)

    document: dict[str, Any] = {
        "head": args.head,
        "mask_mode": mask,
        "quantized": quantized,
    }
    if not windows:
        document |= {"windows": [], "error": "input is shorter than one window"}
        emit(document, args.out)
        return EXIT_OK

    results = asyncio.run(_gather(fn, windows))
    logger.info(f"🏃 Ran {args.head} head over {len(windows)} windows ({mask} attention)")
    document["windows"] = [
        {"index": i, "start": w.start, **_serializable(r)}
        for i, (w, r) in enumerate(zip(windows, results, strict=True))
    ]
    document |= _summarize(args.head, results)
    emit(document, args.out)
    return EXIT_OK
