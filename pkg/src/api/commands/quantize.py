"""``tinymyo quantize``: calibrate an FP32 model and write its int8 form."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from injector import Injector

from src.api.commands.common import (
    add_config_arguments,
    check_windows,
    config_was_given,
    emit,
    load_windows,
)
from src.app.application.quant import calibrate, quantize_model
from src.app.application.tokenizer import embed, patchify
from src.app.domain.config import RunConfig
from src.app.domain.errors import EXIT_OK, ShapeMismatchError
from src.app.infrastructure.storage import load_model, save_quantized

logger = logging.getLogger(__name__)

HELP = "Calibrate activation ranges and write an int8 model plus its quant-params sidecar"


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("weights", type=Path, help="FP32 model container")
    parser.add_argument("calib", type=Path, help="Calibration windows, recording, or CSV")
    parser.add_argument("out", type=Path, help="int8 container to write")
    parser.add_argument("--fs", type=float, help="Sampling rate in Hz (required for CSV)")
    parser.add_argument(
        "--per-channel", action="store_true", help="One weight scale per output row"
    )
    add_config_arguments(parser)


def handle(args: argparse.Namespace, injector: Injector) -> int:
    config = injector.get(RunConfig)
    bundle = load_model(args.weights, config.model if config_was_given(args) else None)
    if bundle.classifier is None:
        raise ShapeMismatchError("The model container has no classification head to quantize")

    windows = load_windows(args.calib, config, args.fs)
    check_windows(windows, bundle.config)
    calib_set = (embed(patchify(w.samples, bundle.config), bundle.weights.tokenizer) for w in windows)
    sites = calibrate(bundle.weights, calib_set, config.attention)

    per_channel = args.per_channel or config.quantization.per_channel_weights
    qm = quantize_model(bundle.weights, bundle.classifier, sites, per_channel=per_channel)
    sidecar = save_quantized(args.out, qm)
    emit(
        {
            "path": str(args.out),
            "sidecar": str(sidecar),
            "calibration_windows": len(windows),
            "sites": len(sites),
            "per_channel": per_channel,
            "requant_worst_rel_error": qm.metadata.get("requant_worst_rel_error"),
        },
        None,
    )
    return EXIT_OK
