"""Dataset container shared by selectors, criteria and the evaluation pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

REGRESSION = "regression"
CLASSIFICATION = "classification"


@dataclass
class StandardizationStats:
    """Per-column training mean/std used to transform train and test alike."""

    mean: np.ndarray
    std: np.ndarray
    constant_columns: list[int] = field(default_factory=list)


@dataclass
class Dataset:
    """Feature matrix plus a numeric response or class labels.

    ``X`` is (n_samples, n_features); ``target`` has length n_samples and is
    float for regression, arbitrary hashable labels for classification.
    """

    X: np.ndarray
    target: np.ndarray
    column_names: list[str]
    task: str
    stats: StandardizationStats | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2:
            raise DataError("feature matrix must be two-dimensional")
        self.target = np.asarray(self.target)
        if self.task == REGRESSION:
            self.target = self.target.astype(float)
        if len(self.target) != self.X.shape[0]:
            raise DataError(
                f"target length {len(self.target)} != sample count {self.X.shape[0]}"
            )
        if len(self.column_names) != self.X.shape[1]:
            raise DataError("column_names must have one entry per feature")
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise DataError(f"unknown task {self.task!r}")
        if not np.all(np.isfinite(self.X)):
            raise DataError("feature matrix contains non-finite entries")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset_rows(self, idx) -> "Dataset":
        return Dataset(
            X=self.X[idx],
            target=self.target[idx],
            column_names=list(self.column_names),
            task=self.task,
            stats=self.stats,
        )


def default_column_names(p: int) -> list[str]:
    return [f"x{i + 1}" for i in range(p)]
