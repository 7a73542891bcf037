"""``tinymyo preprocess``: filter, normalize, and window a recording."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from injector import Injector

from src.api.commands.common import add_config_arguments, emit
from src.app.application.signal import preprocess_record
from src.app.domain.config import PreprocessingConfig
from src.app.domain.errors import EXIT_OK
from src.app.infrastructure.storage import read_waveform, write_windows

logger = logging.getLogger(__name__)

HELP = "Filter, normalize, and window a recording into a windows container"


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", type=Path, help="Recording: CSV or container")
    parser.add_argument("out", type=Path, help="Windows container to write")
    parser.add_argument("--fs", type=float, help="Sampling rate in Hz (required for CSV)")
    add_config_arguments(parser)


def handle(args: argparse.Namespace, injector: Injector) -> int:
    cfg = injector.get(PreprocessingConfig)
    record = read_waveform(args.input, args.fs)
    windows = preprocess_record(record, cfg)
    write_windows(args.out, windows, record.fs)
    emit(
        {
            "path": str(args.out),
            "windows": len(windows),
            "fs": record.fs,
            "channels": windows[0].channel_count if windows else record.channel_count,
            "window_length": cfg.window.length_samples,
            "stride": cfg.window.stride,
        },
        None,
    )
    return EXIT_OK
