"""``tinymyo init``: write a randomly initialized model container."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

import numpy as np
from injector import Injector

from src.api.commands.common import add_config_arguments, emit
from src.app.application.encoder import count_parameters, init_encoder_weights
from src.app.application.heads import init_classifier, init_decoder, init_regression_head
from src.app.domain.config import RunConfig
from src.app.domain.errors import EXIT_OK
from src.app.domain.model.types import ModelBundle
from src.app.infrastructure.storage import save_model

logger = logging.getLogger(__name__)

HELP = "Write a random-weight model container for a config"


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("out", type=Path, help="Model container to write")
    parser.add_argument(
        "--no-regression", action="store_true", help="Leave out the regression head"
    )
    add_config_arguments(parser)


def build_bundle(config: RunConfig, regression: bool = True) -> ModelBundle:
    """Encoder from ``seed``; decoder and heads from a second stream at ``seed + 1``."""
    cfg = config.model
    weights = init_encoder_weights(cfg, config.seed)
    rng = np.random.Generator(np.random.PCG64(config.seed + 1))
    decoder = init_decoder(cfg, rng)
    classifier = init_classifier(cfg.fused_dim, config.head.num_classes, rng)
    head = init_regression_head(cfg, config.head, rng) if regression else None
    return ModelBundle(weights=weights, decoder=decoder, classifier=classifier, regression=head)


def handle(args: argparse.Namespace, injector: Injector) -> int:
    config = injector.get(RunConfig)
    bundle = build_bundle(config, regression=not args.no_regression)
    save_model(args.out, bundle)
    report = count_parameters(bundle.weights, bundle.decoder, bundle.classifier, bundle.regression)
    logger.info(f"🧱 Initialized {report.total} parameters with seed {config.seed}")
    emit({"path": str(args.out), "seed": config.seed, "parameters": report.to_dict()}, None)
    return EXIT_OK
