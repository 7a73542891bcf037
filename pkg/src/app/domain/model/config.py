"""Model geometry and head configuration."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

RopePositions = Literal["flattened", "temporal"]
AttentionMaskMode = Literal["bidirectional", "causal"]
FusionMode = Literal["concat", "mean"]


class ModelConfig(BaseModel):
    """Transformer geometry.

    Defaults are the deployed TinyMyo backbone: a 1000-sample window of 16
    channels cut into 20-sample patches, 8 pre-LN blocks of width 192 with
    3 heads and a 4x MLP.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    timesteps: int = Field(default=1000, ge=1)
    channels: int = Field(default=16, ge=1)
    patch_len: int = Field(default=20, ge=1)
    patch_stride: int = Field(default=20, ge=1)
    embed_dim: int = Field(default=192, ge=1)
    layers: int = Field(default=8, ge=0)
    heads: int = Field(default=3, ge=1)
    mlp_ratio: int = Field(default=4, ge=1)
    rope_base: float = Field(default=10000.0, gt=1.0)
    rope_positions: RopePositions = "flattened"
    ln_eps: float = Field(default=1e-5, gt=0)

    @model_validator(mode="after")
    def _check_geometry(self) -> ModelConfig:
        if self.patch_len > self.timesteps:
            msg = f"patch_len {self.patch_len} exceeds timesteps {self.timesteps}"
            raise ValueError(msg)
        if self.embed_dim % self.heads:
            msg = f"embed_dim {self.embed_dim} is not divisible by heads {self.heads}"
            raise ValueError(msg)
        if (self.embed_dim // self.heads) % 2:
            msg = f"head dim {self.embed_dim // self.heads} must be even for RoPE pairs"
            raise ValueError(msg)
        return self

    @property
    def n_patches(self) -> int:
        return (self.timesteps - self.patch_len) // self.patch_stride + 1

    @property
    def n_tokens(self) -> int:
        return self.channels * self.n_patches

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.heads

    @property
    def mlp_dim(self) -> int:
        return self.mlp_ratio * self.embed_dim

    @property
    def fused_dim(self) -> int:
        return self.channels * self.embed_dim


class HeadConfig(BaseModel):
    """Downstream head shapes."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_classes: int = Field(default=6, ge=1)
    regression_outputs: int = Field(default=5, ge=1)
    regression_hidden: int = Field(default=224, ge=1)
    regression_blocks: int = Field(default=2, ge=0)
    regression_kernel: int = Field(default=5, ge=1)
    regression_length: int = Field(default=1000, ge=1)


__all__ = [
    "AttentionMaskMode",
    "FusionMode",
    "HeadConfig",
    "ModelConfig",
    "RopePositions",
]
