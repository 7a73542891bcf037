"""Classification metrics: accuracy, F1, AUROC, and class-wise error rate."""

from __future__ import annotations

from typing import Literal

import numpy as np
from scipy.stats import rankdata

from src.app.domain.errors import InvalidArgumentError, UndefinedMetricError
from src.app.domain.metrics.types import PredictionSet

AccuracyMode = Literal["micro", "macro"]


def _require_classification(p: PredictionSet) -> None:
    if not p.is_classification:
        raise InvalidArgumentError("classification metric called on a regression PredictionSet")


def confusion_matrix(p: PredictionSet) -> np.ndarray:
    """C[g, q] = samples of true class g predicted as q."""
    _require_classification(p)
    k = p.num_classes
    matrix = np.zeros((k, k), dtype=np.int64)
    np.add.at(matrix, (p.labels, p.predictions()), 1)
    return matrix


def _one_vs_rest(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    tp = np.diag(matrix).astype(np.float64)
    fp = matrix.sum(axis=0) - tp
    fn = matrix.sum(axis=1) - tp
    tn = matrix.sum() - tp - fp - fn
    return tp, tn, fp, fn


def accuracy(p: PredictionSet, mode: AccuracyMode = "micro") -> float:
    """Micro: fraction correct. Macro: mean one-vs-rest (TP + TN) / all."""
    matrix = confusion_matrix(p)
    if mode == "micro":
        return float(np.trace(matrix) / matrix.sum())
    if mode != "macro":
        msg = f"accuracy mode must be 'micro' or 'macro', got {mode!r}"
        raise InvalidArgumentError(msg)
    tp, tn, fp, fn = _one_vs_rest(matrix)
    return float(np.mean((tp + tn) / (tp + tn + fp + fn)))


def f1_macro(p: PredictionSet) -> float:
    """Mean of 2TP / (2TP + FP + FN); a class with nothing to score adds 0."""
    tp, _, fp, fn = _one_vs_rest(confusion_matrix(p))
    denominator = 2 * tp + fp + fn
    per_class = np.divide(2 * tp, denominator, out=np.zeros_like(tp), where=denominator > 0)
    return float(per_class.mean())


def auroc_macro(p: PredictionSet) -> float:
    """Mean one-vs-rest Mann-Whitney AUROC with midranks for ties.

    Classes without both positives and negatives are left out of the mean.

    Raises:
        UndefinedMetricError: If every class is left out.
    """
    _require_classification(p)
    n = p.labels.shape[0]
    values = []
    for k in range(p.num_classes):
        positive = p.labels == k
        n_pos = int(positive.sum())
        n_neg = n - n_pos
        if n_pos == 0 or n_neg == 0:
            continue
        ranks = rankdata(p.scores[:, k], method="average")
        u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
        values.append(u / (n_pos * n_neg))
    if not values:
        raise UndefinedMetricError("AUROC is undefined: no class has both positives and negatives")
    return float(np.mean(values))


def cler(p: PredictionSet) -> float:
    """Mean over gestures of 1 - C[g, g] / sum_q C[g, q].

    Raises:
        UndefinedMetricError: Naming the first gesture absent from the labels.
    """
    matrix = confusion_matrix(p)
    support = matrix.sum(axis=1)
    missing = np.flatnonzero(support == 0)
    if missing.size:
        msg = f"CLER is undefined: gesture {int(missing[0])} never occurs in the labels"
        raise UndefinedMetricError(msg)
    return float(np.mean(1.0 - np.diag(matrix) / support))


def classification_report(p: PredictionSet) -> dict[str, float | str | None]:
    """All classification metrics; undefined ones are None with a reason."""
    report: dict[str, float | str | None] = {
        "accuracy_micro": accuracy(p, "micro"),
        "accuracy_macro": accuracy(p, "macro"),
        "f1_macro": f1_macro(p),
    }
    for name, metric in (("auroc_macro", auroc_macro), ("cler", cler)):
        try:
            report[name] = metric(p)
        except UndefinedMetricError as exc:
            report[name] = None
            report[f"{name}_error"] = str(exc)
    return report


__all__ = [
    "AccuracyMode",
    "accuracy",
    "auroc_macro",
    "classification_report",
    "cler",
    "confusion_matrix",
    "f1_macro",
]
