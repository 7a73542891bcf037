"""Metric domain types."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from src.app.domain.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Classification scores/labels or regression values/targets.

    Exactly one of the two pairs must be present.
    """

    scores: np.ndarray | None = None  # [n, K]
    labels: np.ndarray | None = None  # [n]
    values: np.ndarray | None = None  # [n, D]
    targets: np.ndarray | None = None  # [n, D]

    def __post_init__(self) -> None:
        if self.scores is not None or self.labels is not None:
            self._check_classification()
        elif self.values is not None and self.targets is not None:
            self._check_regression()
        else:
            raise InvalidArgumentError("PredictionSet needs scores+labels or values+targets")

    def _check_classification(self) -> None:
        if self.scores is None or self.labels is None:
            raise InvalidArgumentError("classification needs both scores and labels")
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels)
        if scores.ndim != 2 or labels.ndim != 1 or scores.shape[0] != labels.shape[0]:
            msg = f"scores {scores.shape} and labels {labels.shape} disagree"
            raise InvalidArgumentError(msg)
        if labels.shape[0] < 1:
            raise InvalidArgumentError("PredictionSet must hold at least one sample")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.mod(labels, 1) == 0):
                raise InvalidArgumentError("labels must be integers")
            labels = labels.astype(np.int64)
        if labels.min() < 0 or labels.max() >= scores.shape[1]:
            msg = f"labels must lie in [0, {scores.shape[1]})"
            raise InvalidArgumentError(msg)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels.astype(np.int64))

    def _check_regression(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if targets.ndim == 1:
            targets = targets[:, None]
        if values.shape != targets.shape:
            msg = f"values {values.shape} and targets {targets.shape} disagree"
            raise InvalidArgumentError(msg)
        if values.shape[0] < 1:
            raise InvalidArgumentError("PredictionSet must hold at least one sample")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "targets", targets)

    @property
    def is_classification(self) -> bool:
        return self.scores is not None

    @property
    def num_classes(self) -> int:
        return int(self.scores.shape[1]) if self.scores is not None else 0

    def predictions(self) -> np.ndarray:
        """Argmax class per sample (first maximum on ties)."""
        return np.argmax(self.scores, axis=1)


@dataclass(frozen=True)
class RegressionReport:
    mae: float
    rmse: float
    r2: float | None
    per_dof: dict[str, list[float | None]]
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


__all__ = ["PredictionSet", "RegressionReport"]
