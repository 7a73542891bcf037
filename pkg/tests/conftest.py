"""Shared fixtures: tiny and desk-scale configs, seeded generators, random models."""

from __future__ import annotations

import numpy as np
import pytest

from src.app.application.encoder import init_encoder_weights
from src.app.application.heads import init_classifier, init_decoder
from src.app.domain.model.config import ModelConfig
from src.app.domain.model.types import ModelBundle


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(1234))


@pytest.fixture
def tiny_config() -> ModelConfig:
    """Two channels of three 4-sample patches, width 8, two heads."""
    return ModelConfig(
        timesteps=12, channels=2, patch_len=4, patch_stride=4, embed_dim=8, layers=2, heads=2
    )


@pytest.fixture
def desk_config() -> ModelConfig:
    """48 tokens of width 32; small enough for integer-path statistics."""
    return ModelConfig(
        timesteps=240, channels=4, patch_len=20, patch_stride=20, embed_dim=32, layers=2, heads=2
    )


@pytest.fixture
def tiny_bundle(tiny_config: ModelConfig) -> ModelBundle:
    weights = init_encoder_weights(tiny_config, seed=7, std=0.2)
    rng = np.random.Generator(np.random.PCG64(8))
    return ModelBundle(
        weights=weights,
        decoder=init_decoder(tiny_config, rng, std=0.2),
        classifier=init_classifier(tiny_config.fused_dim, 3, rng, std=0.2),
    )
