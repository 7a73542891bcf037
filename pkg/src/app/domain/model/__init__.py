"""Model geometry, parameter stores, and reports."""

from src.app.domain.model.config import AttentionMaskMode, HeadConfig, ModelConfig
from src.app.domain.model.types import (
    BlockWeights,
    ClassifierHead,
    DecoderWeights,
    EncoderWeights,
    FusedFeature,
    LossReport,
    ParamReport,
    PatchGrid,
    RegressionBlock,
    RegressionHead,
    TokenizerWeights,
    TokenSequence,
)

__all__ = [
    "AttentionMaskMode",
    "BlockWeights",
    "ClassifierHead",
    "DecoderWeights",
    "EncoderWeights",
    "FusedFeature",
    "HeadConfig",
    "LossReport",
    "ModelConfig",
    "ParamReport",
    "PatchGrid",
    "RegressionBlock",
    "RegressionHead",
    "TokenSequence",
    "TokenizerWeights",
]
