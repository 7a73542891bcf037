"""Patching, shared linear embedding, and random masking."""

from src.app.application.tokenizer.embedding import (
    apply_mask,
    embed,
    init_tokenizer_weights,
    token_indices,
)
from src.app.application.tokenizer.patching import patchify, unpatchify

__all__ = [
    "apply_mask",
    "embed",
    "init_tokenizer_weights",
    "patchify",
    "token_indices",
    "unpatchify",
]
