"""Helpers shared by the subcommands."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any

import numpy as np

from src.app.application.signal import preprocess_record
from src.app.domain.config import PRESETS, RunConfig, preset
from src.app.domain.errors import ShapeMismatchError
from src.app.domain.model.config import ModelConfig
from src.app.domain.signal.types import Window
from src.app.infrastructure.storage import dumps, load_run_config, read_input, write_json

DEFAULT_PRESET = "pretraining"


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--config", type=Path, help="Run config JSON")
    group.add_argument(
        "--preset", choices=sorted(PRESETS), help=f"Named preset (default {DEFAULT_PRESET})"
    )
    parser.add_argument("--seed", type=int, help="Override the config seed")


def add_output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, help="Write JSON here instead of stdout")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file, else preset, else the default preset; ``--seed`` wins."""
    if getattr(args, "config", None) is not None:
        config = load_run_config(args.config)
    else:
        config = preset(getattr(args, "preset", None) or DEFAULT_PRESET)
    if getattr(args, "seed", None) is not None:
        config = config.model_copy(update={"seed": args.seed})
    return config


def config_was_given(args: argparse.Namespace) -> bool:
    return getattr(args, "config", None) is not None or getattr(args, "preset", None) is not None


def emit(data: Any, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(dumps(data))
    else:
        write_json(out, data)


def as_float32(values: np.ndarray | float) -> Any:
    """Round to float32 and back to the shortest decimal that identifies it.

    Platform-level float64 noise below float32 resolution disappears, so the
    emitted JSON is byte-stable.
    """
    array = np.asarray(values, dtype=np.float32)
    if array.ndim == 0:
        return float(np.format_float_positional(array, unique=True, trim="-"))
    return [as_float32(v) for v in array]


def load_windows(path: Path, config: RunConfig, fs: float | None) -> list[Window]:
    """Windows from a windows container, or a recording run through preprocessing."""
    loaded = read_input(path, fs)
    if isinstance(loaded, list):
        return loaded
    return preprocess_record(loaded, config.preprocessing)


def check_windows(windows: list[Window], cfg: ModelConfig) -> None:
    for index, window in enumerate(windows):
        if window.samples.shape != (cfg.timesteps, cfg.channels):
            msg = (
                f"Window {index} has shape {window.samples.shape}; the model expects "
                f"({cfg.timesteps}, {cfg.channels})"
            )
            raise ShapeMismatchError(msg)
