"""Dependency injection container configuration."""

from __future__ import annotations

from injector import Binder, Injector, Module

from src.app.domain.config import (
    PlannerConfig,
    PreprocessingConfig,
    QuantizationConfig,
    RunConfig,
    default_run_config,
)
from src.app.domain.model.config import HeadConfig, ModelConfig
from src.app.domain.sched.types import MemoryHierarchy


class ConfigModule(Module):
    """Binds a run config and each of its sections as its own type."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config

    def configure(self, binder: Binder) -> None:
        cfg = self.config
        binder.bind(RunConfig, to=cfg)
        binder.bind(ModelConfig, to=cfg.model)
        binder.bind(PreprocessingConfig, to=cfg.preprocessing)
        binder.bind(QuantizationConfig, to=cfg.quantization)
        binder.bind(HeadConfig, to=cfg.head)
        binder.bind(MemoryHierarchy, to=cfg.hierarchy)
        binder.bind(PlannerConfig, to=cfg.planner)


def create_base_injector(config: RunConfig | None = None) -> Injector:
    """Create the injector for one CLI invocation.

    Args:
        config: Validated run configuration; the ``pretraining`` preset when omitted.

    Returns:
        Injector with every configuration section bound.
    """
    return Injector([ConfigModule(config or default_run_config())])


__all__ = ["ConfigModule", "create_base_injector"]
