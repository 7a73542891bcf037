"""Evaluation metrics."""

from src.app.application.metrics.classification import (
    accuracy,
    auroc_macro,
    classification_report,
    cler,
    confusion_matrix,
    f1_macro,
)
from src.app.application.metrics.regression import regression_metrics

__all__ = [
    "accuracy",
    "auroc_macro",
    "classification_report",
    "cler",
    "confusion_matrix",
    "f1_macro",
    "regression_metrics",
]
