"""Regression metrics over all scalar entries, plus a per-DoF breakdown."""

from __future__ import annotations

import numpy as np

from src.app.domain.errors import InvalidArgumentError
from src.app.domain.metrics.types import PredictionSet, RegressionReport


def _r2(values: np.ndarray, targets: np.ndarray) -> float | None:
    total = float(np.sum((targets - targets.mean()) ** 2))
    if total == 0.0:
        return None
    return 1.0 - float(np.sum((targets - values) ** 2)) / total


def _rmse(residual: np.ndarray, axis: int | None = None) -> np.ndarray:
    """Root mean square scaled by the largest magnitude, so tiny residuals do not underflow."""
    peak = np.max(np.abs(residual), axis=axis, keepdims=True)
    unit = residual / np.where(peak > 0, peak, 1.0)
    return np.squeeze(peak * np.sqrt(np.mean(unit**2, axis=axis, keepdims=True)), axis=axis)


def regression_metrics(p: PredictionSet) -> RegressionReport:
    """MAE, RMSE, and R^2 over every entry of the [n, D] arrays.

    R^2 is None, with ``error`` set, when the targets have zero variance; MAE
    and RMSE are still reported.
    """
    if p.is_classification:
        raise InvalidArgumentError("regression_metrics called on a classification PredictionSet")
    values, targets = p.values, p.targets
    residual = values - targets

    r2 = _r2(values, targets)
    per_dof: dict[str, list[float | None]] = {
        "mae": [float(v) for v in np.mean(np.abs(residual), axis=0)],
        "rmse": [float(v) for v in _rmse(residual, axis=0)],
        "r2": [_r2(values[:, j], targets[:, j]) for j in range(values.shape[1])],
    }
    return RegressionReport(
        mae=float(np.mean(np.abs(residual))),
        rmse=float(_rmse(residual)),
        r2=r2,
        per_dof=per_dof,
        error=None if r2 is not None else "R^2 is undefined: targets have zero variance",
    )


__all__ = ["regression_metrics"]
