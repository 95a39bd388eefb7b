"""Constant-prediction baselines.

Both ignore the feature table entirely (any dtypes, any missingness), so a
baseline pipeline needs no preprocessing and always fits. They anchor the
solution ranking: anything below them is worse than no model at all.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .base import Estimator, FeatureTable


class MeanBaseline(Estimator):
    """Predicts the training-target mean everywhere (regression)."""

    name = "mean_baseline"

    def __init__(self):
        self.mean_: float | None = None

    def fit(self, table: FeatureTable, y: np.ndarray) -> "MeanBaseline":
        self.mean_ = float(np.asarray(y, dtype=float).mean())
        return self

    def predict(self, table: FeatureTable) -> np.ndarray:
        return np.full(table.row_count, self.mean_)

    def state_dict(self) -> dict[str, Any]:
        return {"mean": self.mean_}

    def load_state(self, state: dict[str, Any]) -> None:
        self.mean_ = state["mean"]


class MajorityClassBaseline(Estimator):
    """Predicts the most frequent training label everywhere (classification).

    Frequency ties resolve to the alphabetically smallest label.
    """

    name = "majority_class_baseline"

    def __init__(self):
        self.label_: str | None = None

    def fit(self, table: FeatureTable, y: np.ndarray) -> "MajorityClassBaseline":
        counts: dict[str, int] = {}
        for v in y:
            label = str(v)
            counts[label] = counts.get(label, 0) + 1
        self.label_ = min(counts, key=lambda c: (-counts[c], c))
        return self

    def predict(self, table: FeatureTable) -> np.ndarray:
        return np.array([self.label_] * table.row_count, dtype=object)

    def state_dict(self) -> dict[str, Any]:
        return {"label": self.label_}

    def load_state(self, state: dict[str, Any]) -> None:
        self.label_ = state["label"]
