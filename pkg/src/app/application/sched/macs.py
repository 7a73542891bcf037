"""MAC accounting and the GEMM decomposition of a transformer block."""

from __future__ import annotations

from src.app.domain.model.config import ModelConfig
from src.app.domain.sched.types import GemmWorkload, MacBreakdown

COMPONENT_LABELS = {
    "qkv": "MHSA Q/K/V projections",
    "qk": "MHSA QK scores",
    "av": "MHSA AV context",
    "out": "MHSA output projection",
    "fc1": "MLP FC1",
    "fc2": "MLP FC2",
}

INT32_BYTES = 4


def count_macs(cfg: ModelConfig, num_classes: int | None = None) -> MacBreakdown:
    """Per-block MACs by component.

    With ``num_classes`` the patch projection and the classifier are counted
    as ``head_macs`` on top of the blocks.
    """
    n, d, m = cfg.n_tokens, cfg.embed_dim, cfg.mlp_dim
    components = {
        "qkv": n * d * 3 * d,
        "qk": n * n * d,
        "av": n * n * d,
        "out": n * d * d,
        "fc1": n * d * m,
        "fc2": n * m * d,
    }
    head_macs = 0
    if num_classes is not None:
        head_macs = n * cfg.patch_len * d + num_classes * cfg.fused_dim
    return MacBreakdown(components=components, layers=cfg.layers, head_macs=head_macs)


def millions(value: int) -> int:
    """Round to whole millions, halves up."""
    return (value + 500_000) // 1_000_000


def mac_table(breakdown: MacBreakdown) -> list[dict[str, str | int]]:
    """Rows of component label, exact MACs, rounded millions, and percent share."""
    return [
        {
            "component": COMPONENT_LABELS.get(key, key),
            "macs": macs,
            "macs_m": f"{millions(macs)}M",
            "share": f"{int(breakdown.share(key) * 100 + 0.5)}%",
        }
        for key, macs in breakdown.components.items()
    ]


def gemm_workloads(cfg: ModelConfig) -> list[GemmWorkload]:
    """The six int8 GEMMs of one block; QK writes int32 scores."""
    n, d, d_h, m = cfg.n_tokens, cfg.embed_dim, cfg.head_dim, cfg.mlp_dim
    return [
        GemmWorkload("qkv", m=n, k=d, n=3 * d),
        GemmWorkload("qk", m=n, k=d_h, n=n, batch=cfg.heads, out_bytes=INT32_BYTES),
        GemmWorkload("av", m=n, k=n, n=d_h, batch=cfg.heads),
        GemmWorkload("out", m=n, k=d, n=d),
        GemmWorkload("fc1", m=n, k=d, n=m),
        GemmWorkload("fc2", m=n, k=m, n=d),
    ]


__all__ = ["COMPONENT_LABELS", "count_macs", "gemm_workloads", "mac_table", "millions"]
