"""Model domain types: patch grids, token sequences, and parameter stores.

Parameters are held as float32 arrays (the FP32 model); numerics accumulate in
float64.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from src.app.domain.model.config import HeadConfig, ModelConfig


@dataclass(frozen=True, eq=False)
class PatchGrid:
    """Patches of shape [C, N_p, L]."""

    patches: np.ndarray

    @property
    def channels(self) -> int:
        return int(self.patches.shape[0])

    @property
    def n_patches(self) -> int:
        return int(self.patches.shape[1])

    @property
    def patch_len(self) -> int:
        return int(self.patches.shape[2])

    def flat(self) -> np.ndarray:
        """Patches in token order k = c * N_p + i, shape [N, L]."""
        c, n_p, length = self.patches.shape
        return self.patches.reshape(c * n_p, length)


@dataclass(frozen=True, eq=False)
class TokenSequence:
    """Channel-major flattened token embeddings.

    Attributes:
        embeddings: [N, d_e].
        mask_flags: [N] booleans, True where the mask token was substituted.
        channel_of: [N] channel index of each token.
        patch_of: [N] temporal patch index of each token.
        grid: Source patches, when the sequence came from ``embed``.
    """

    embeddings: np.ndarray
    mask_flags: np.ndarray
    channel_of: np.ndarray
    patch_of: np.ndarray
    grid: PatchGrid | None = None

    @property
    def n_tokens(self) -> int:
        return int(self.embeddings.shape[0])

    @property
    def channels(self) -> int:
        return int(self.channel_of.max()) + 1 if self.n_tokens else 0

    @property
    def n_patches(self) -> int:
        return int(self.patch_of.max()) + 1 if self.n_tokens else 0


@dataclass(frozen=True, eq=False)
class TokenizerWeights:
    """Shared patch projection and the learnable mask token."""

    w_proj: np.ndarray  # [d_e, L]
    b_proj: np.ndarray  # [d_e]
    mask_token: np.ndarray  # [d_e]


@dataclass(frozen=True, eq=False)
class BlockWeights:
    """One pre-LN transformer block."""

    ln1_gamma: np.ndarray
    ln1_beta: np.ndarray
    w_qkv: np.ndarray  # [3 d_e, d_e]
    b_qkv: np.ndarray
    w_out: np.ndarray  # [d_e, d_e]
    b_out: np.ndarray
    ln2_gamma: np.ndarray
    ln2_beta: np.ndarray
    w_fc1: np.ndarray  # [m, d_e]
    b_fc1: np.ndarray
    w_fc2: np.ndarray  # [d_e, m]
    b_fc2: np.ndarray


@dataclass(frozen=True, eq=False)
class EncoderWeights:
    """Tokenizer, transformer blocks, and the final LayerNorm."""

    config: ModelConfig
    tokenizer: TokenizerWeights
    blocks: list[BlockWeights]
    final_ln_gamma: np.ndarray
    final_ln_beta: np.ndarray


@dataclass(frozen=True, eq=False)
class DecoderWeights:
    """Single linear layer mapping an embedding back to a patch."""

    w_dec: np.ndarray  # [L, d_e]
    b_dec: np.ndarray  # [L]


@dataclass(frozen=True, eq=False)
class FusedFeature:
    """Pooled feature: length C * d_e when concatenated, d_e when channel-averaged."""

    vector: np.ndarray


@dataclass(frozen=True, eq=False)
class ClassifierHead:
    """Single fully connected layer on the fused feature."""

    w: np.ndarray  # [K, C d_e]
    b: np.ndarray  # [K]

    @property
    def num_classes(self) -> int:
        return int(self.w.shape[0])


@dataclass(frozen=True, eq=False)
class RegressionBlock:
    """Depthwise conv followed by a pointwise conv over the patch axis."""

    dw_kernel: np.ndarray  # [h, k]
    dw_bias: np.ndarray  # [h]
    pw_weight: np.ndarray  # [h, h]
    pw_bias: np.ndarray  # [h]


@dataclass(frozen=True, eq=False)
class RegressionHead:
    """Pointwise/depthwise conv stack with linear-interpolation upsampling."""

    w_in: np.ndarray  # [h, C d_e]
    b_in: np.ndarray  # [h]
    blocks: list[RegressionBlock]
    w_out: np.ndarray  # [outputs, h]
    b_out: np.ndarray  # [outputs]
    output_length: int

    @property
    def outputs(self) -> int:
        return int(self.w_out.shape[0])


@dataclass(frozen=True, eq=False)
class ModelBundle:
    """An encoder with whichever heads were stored alongside it."""

    weights: EncoderWeights
    decoder: DecoderWeights | None = None
    classifier: ClassifierHead | None = None
    regression: RegressionHead | None = None

    @property
    def config(self) -> ModelConfig:
        return self.weights.config


@dataclass(frozen=True)
class LossReport:
    l_masked: float
    l_visible: float
    l_total: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ParamReport:
    """Exact parameter counts per component."""

    tokenizer: int
    mask_token: int
    per_block: int
    blocks: int
    final_ln: int
    decoder: int = 0
    classifier: int = 0
    regression: int = 0
    total: int = field(init=False)

    def __post_init__(self) -> None:
        total = (
            self.tokenizer
            + self.mask_token
            + self.blocks
            + self.final_ln
            + self.decoder
            + self.classifier
            + self.regression
        )
        object.__setattr__(self, "total", total)

    @property
    def encoder(self) -> int:
        return self.tokenizer + self.mask_token + self.blocks + self.final_ln

    def to_dict(self) -> dict[str, int]:
        return {**asdict(self), "encoder": self.encoder}


__all__ = [
    "BlockWeights",
    "ClassifierHead",
    "DecoderWeights",
    "EncoderWeights",
    "FusedFeature",
    "HeadConfig",
    "LossReport",
    "ModelBundle",
    "ModelConfig",
    "ParamReport",
    "PatchGrid",
    "RegressionBlock",
    "RegressionHead",
    "TokenSequence",
    "TokenizerWeights",
]
