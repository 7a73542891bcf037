"""Waveform and window files: CSV recordings and window containers."""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import numpy as np

from src.app.domain.errors import ContainerIOError, InvalidArgumentError
from src.app.domain.signal.types import WaveformRecord, Window
from src.app.infrastructure.storage.container import load_container, save_container

logger = logging.getLogger(__name__)

RECORDING_KIND = "recording"
WINDOWS_KIND = "windows"


def _read_csv(path: Path, fs: float | None) -> WaveformRecord:
    if fs is None:
        raise InvalidArgumentError(f"{path}: CSV recordings need an explicit sampling rate (--fs)")
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            header = next(csv.reader(handle), None)
            if not header:
                msg = f"{path}: empty CSV"
                raise ContainerIOError(msg)
            expected = [f"ch{i}" for i in range(len(header))]
            if [h.strip() for h in header] != expected:
                msg = f"{path}: header must be {','.join(expected)}"
                raise ContainerIOError(msg)
            samples = np.loadtxt(handle, delimiter=",", ndmin=2, dtype=np.float64)
    except ContainerIOError:
        raise
    except OSError as exc:
        msg = f"Cannot read {path}: {exc}"
        raise ContainerIOError(msg) from exc
    except ValueError as exc:
        msg = f"{path}: malformed sample row ({exc})"
        raise ContainerIOError(msg) from exc
    if samples.shape[1] != len(header):
        msg = f"{path}: rows have {samples.shape[1]} columns, header has {len(header)}"
        raise ContainerIOError(msg)
    return WaveformRecord(samples=samples, fs=fs)


def _record_from(
    path: Path, tensors: dict[str, np.ndarray], metadata: dict[str, str], fs: float | None
) -> WaveformRecord:
    if "samples" not in tensors:
        msg = f"{path}: container has no 'samples' tensor"
        raise ContainerIOError(msg)
    rate = fs if fs is not None else float(metadata.get("fs", "nan"))
    if not rate > 0:
        raise InvalidArgumentError(f"{path}: no sampling rate stored or given")
    return WaveformRecord(samples=tensors["samples"], fs=rate)


def _windows_from(
    path: Path, tensors: dict[str, np.ndarray], metadata: dict[str, str]
) -> list[Window]:
    if metadata.get("kind") != WINDOWS_KIND or "windows" not in tensors:
        msg = f"{path} is not a windows container"
        raise ContainerIOError(msg)
    fs = float(metadata["fs"])
    starts = tensors.get("starts", np.arange(tensors["windows"].shape[0]))
    return [
        Window(samples=samples, fs=fs, start=int(start))
        for samples, start in zip(tensors["windows"], starts, strict=True)
    ]


def read_waveform(path: str | Path, fs: float | None = None) -> WaveformRecord:
    """Load a recording from CSV (``ch0..ch{C-1}`` header) or a container.

    A container stores a ``samples`` tensor [T, C] and ``fs`` metadata; an
    explicit ``fs`` overrides it.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        record = _read_csv(path, fs)
    else:
        record = _record_from(path, *load_container(path), fs)
    logger.info(f"🎚️ Read {record.length} samples x {record.channel_count} channels at {record.fs} Hz")
    return record


def write_recording(path: str | Path, record: WaveformRecord) -> None:
    save_container(
        path,
        {"samples": record.samples.astype(np.float32)},
        {"kind": RECORDING_KIND, "fs": repr(float(record.fs))},
    )


def write_windows(path: str | Path, windows: list[Window], fs: float) -> None:
    """Stack windows into ``windows`` [W, T, C] float32 and ``starts`` [W] int64."""
    if windows:
        stacked = np.stack([w.samples for w in windows]).astype(np.float32)
    else:
        stacked = np.zeros((0, 0, 0), dtype=np.float32)
    starts = np.array([w.start for w in windows], dtype=np.int64)
    save_container(
        path,
        {"windows": stacked, "starts": starts},
        {"kind": WINDOWS_KIND, "fs": repr(float(fs)), "count": str(len(windows))},
    )


def read_windows(path: str | Path) -> list[Window]:
    path = Path(path)
    return _windows_from(path, *load_container(path))


def read_input(path: str | Path, fs: float | None = None) -> WaveformRecord | list[Window]:
    """Windows from a windows container, otherwise a recording to preprocess."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_waveform(path, fs)
    tensors, metadata = load_container(path)
    if metadata.get("kind") == WINDOWS_KIND:
        return _windows_from(path, tensors, metadata)
    return _record_from(path, tensors, metadata, fs)


__all__ = ["read_input", "read_waveform", "read_windows", "write_recording", "write_windows"]
