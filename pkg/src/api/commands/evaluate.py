"""``tinymyo eval``: metrics from prediction and label files."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Literal

import numpy as np
from injector import Injector

from src.api.commands.common import add_output_argument, emit
from src.app.application.metrics import classification_report, regression_metrics
from src.app.domain.errors import EXIT_OK, ContainerIOError, InvalidArgumentError
from src.app.domain.metrics.types import PredictionSet
from src.app.infrastructure.storage import read_json

HELP = "Score predictions against labels (classification or regression)"

Task = Literal["classification", "regression"]
# keys accepted for the array inside a JSON object, in lookup order
ARRAY_KEYS = ("scores", "logits", "values", "labels", "targets")


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("preds", type=Path, help="Scores or values: JSON, CSV, or `run` output")
    parser.add_argument("labels", type=Path, help="Class labels or regression targets: JSON or CSV")
    parser.add_argument("--task", choices=("classification", "regression"), default="classification")
    add_output_argument(parser)


def _from_json(path: Path) -> np.ndarray:
    data: Any = read_json(path)
    if isinstance(data, dict):
        if "windows" in data:
            key = "logits" if data.get("head") == "classification" else "trajectory"
            data = [w[key] for w in data["windows"]]
        else:
            key = next((k for k in ARRAY_KEYS if k in data), None)
            if key is None:
                msg = f"{path}: expected a list or an object with one of {list(ARRAY_KEYS)}"
                raise ContainerIOError(msg)
            data = data[key]
    try:
        return np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        msg = f"{path}: not a numeric array ({exc})"
        raise ContainerIOError(msg) from exc


def _from_csv(path: Path) -> np.ndarray:
    try:
        with path.open(encoding="utf-8") as handle:
            first = handle.readline()
            skip = 0 if _is_numeric_row(first) else 1
        return np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, dtype=np.float64)
    except OSError as exc:
        msg = f"Cannot read {path}: {exc}"
        raise ContainerIOError(msg) from exc
    except ValueError as exc:
        msg = f"{path}: malformed row ({exc})"
        raise ContainerIOError(msg) from exc


def _is_numeric_row(line: str) -> bool:
    try:
        [float(cell) for cell in line.strip().split(",")]
    except ValueError:
        return False
    return True


def read_array(path: Path) -> np.ndarray:
    """A numeric array from JSON or CSV; a CSV may start with one header row."""
    return _from_csv(path) if path.suffix.lower() == ".csv" else _from_json(path)


def build_prediction_set(preds: np.ndarray, labels: np.ndarray, task: Task) -> PredictionSet:
    if task == "classification":
        if labels.ndim == 2 and labels.shape[1] == 1:
            labels = labels[:, 0]
        if labels.ndim != 1:
            msg = f"Class labels must be one column, got shape {labels.shape}"
            raise InvalidArgumentError(msg)
        return PredictionSet(scores=np.atleast_2d(preds), labels=labels)
    if preds.ndim == 3:
        preds = preds.reshape(-1, preds.shape[-1])
    if labels.ndim == 3:
        labels = labels.reshape(-1, labels.shape[-1])
    return PredictionSet(values=preds, targets=labels)


def handle(args: argparse.Namespace, injector: Injector) -> int:
    p = build_prediction_set(read_array(args.preds), read_array(args.labels), args.task)
    if args.task == "classification":
        report: dict[str, Any] = classification_report(p)
    else:
        report = regression_metrics(p).to_dict()
    samples = p.labels.shape[0] if p.is_classification else p.values.shape[0]
    emit({"task": args.task, "samples": int(samples), **report}, args.out)
    return EXIT_OK
