"""Run configuration schema and named presets."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.app.domain.errors import ConfigValidationError
from src.app.domain.model.config import AttentionMaskMode, HeadConfig, ModelConfig
from src.app.domain.sched.types import MemoryHierarchy
from src.app.domain.signal.types import (
    FilterSpec,
    NormalizationMode,
    NormalizationScope,
    WindowSpec,
)


class PreprocessingConfig(BaseModel):
    """Filter chain, normalization, windowing, and channel padding."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    filters: tuple[FilterSpec, ...] = ()
    window: WindowSpec
    normalization: NormalizationMode = "minmax_pm1"
    normalization_scope: NormalizationScope = "window"
    pad_channels_to: int | None = Field(default=None, ge=1)


class MaskConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    ratio: float = Field(default=0.5, ge=0.0, lt=1.0)


class QuantizationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    enabled: bool = False
    per_channel_weights: bool = False


class PlannerConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alignment: int = Field(default=4, ge=1)
    merge_inplace: bool = False

    @field_validator("alignment")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            msg = f"alignment must be a power of two, got {value}"
            raise ValueError(msg)
        return value


class RunConfig(BaseModel):
    """Everything a reproducible run needs; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    model: ModelConfig
    preprocessing: PreprocessingConfig
    seed: int
    mask: MaskConfig = MaskConfig()
    attention: AttentionMaskMode = "bidirectional"
    quantization: QuantizationConfig = QuantizationConfig()
    head: HeadConfig = HeadConfig()
    hierarchy: MemoryHierarchy = MemoryHierarchy()
    planner: PlannerConfig = PlannerConfig()


def _pretraining() -> dict[str, Any]:
    return {
        "model": {},
        "preprocessing": {
            "filters": [
                {"kind": "bandpass", "order": 4, "cutoffs_hz": [20.0, 450.0]},
                {"kind": "notch", "cutoffs_hz": [50.0]},
            ],
            "window": {"length_samples": 1000, "overlap_fraction": 0.5},
            "normalization": "minmax_pm1",
            "pad_channels_to": 16,
        },
        "seed": 0,
    }


def _gesture() -> dict[str, Any]:
    return {
        "model": {},
        "preprocessing": {
            "filters": [
                {"kind": "bandpass", "order": 4, "cutoffs_hz": [20.0, 90.0]},
                {"kind": "notch", "cutoffs_hz": [50.0]},
            ],
            "window": {"length_samples": 1000, "overlap_fraction": 0.25},
            "normalization": "zscore",
            "pad_channels_to": 16,
        },
        "seed": 0,
    }


def _speech_style() -> dict[str, Any]:
    return {
        "model": {},
        "preprocessing": {
            "filters": [
                {
                    "kind": "notch",
                    "cutoffs_hz": [60.0 * k for k in range(1, 7)],
                    "drop_above_nyquist": True,
                },
                {"kind": "highpass", "order": 3, "cutoffs_hz": [2.0]},
            ],
            "window": {"length_samples": 1000, "overlap_fraction": 0.0},
            "normalization": "zscore",
            "pad_channels_to": 16,
        },
        "seed": 0,
    }


def _kinematics() -> dict[str, Any]:
    return {
        "model": {},
        "preprocessing": {
            "window": {"length_samples": 1000, "overlap_fraction": 0.0},
            "normalization": "zscore",
            "pad_channels_to": 16,
        },
        "head": {"regression_length": 1000},
        "seed": 0,
    }


def _neuromotor() -> dict[str, Any]:
    return {
        "model": {},
        "preprocessing": {
            "window": {"length_samples": 1000, "overlap_fraction": 0.75},
            "normalization": "none",
            "pad_channels_to": 16,
        },
        "attention": "causal",
        "seed": 0,
    }


PRESETS = {
    "pretraining": _pretraining,
    "gesture": _gesture,
    "speech_style": _speech_style,
    "kinematics": _kinematics,
    "neuromotor": _neuromotor,
}


def parse_run_config(data: dict[str, Any]) -> RunConfig:
    """Validate a raw mapping into a RunConfig.

    Raises:
        ConfigValidationError: Naming every offending field.
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        fields = [".".join(str(part) for part in err["loc"]) for err in exc.errors()]
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in exc.errors()
        )
        msg = f"Invalid run config: {details}"
        raise ConfigValidationError(msg, fields=fields) from exc


def preset(name: str) -> RunConfig:
    """Return a named preset as a validated RunConfig."""
    try:
        factory = PRESETS[name]
    except KeyError:
        msg = f"Unknown preset '{name}'; choose from {sorted(PRESETS)}"
        raise ConfigValidationError(msg, fields=["preset"]) from None
    return parse_run_config(factory())


def default_run_config() -> RunConfig:
    return preset("pretraining")


__all__ = [
    "PRESETS",
    "MaskConfig",
    "PlannerConfig",
    "PreprocessingConfig",
    "QuantizationConfig",
    "RunConfig",
    "default_run_config",
    "parse_run_config",
    "preset",
]
