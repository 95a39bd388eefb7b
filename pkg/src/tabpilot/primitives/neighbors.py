"""k-nearest-neighbor estimators with deterministic tie handling.

Neighbors are ordered by (Euclidean distance, training row index), so equal
distances resolve to the earlier training row. Classification vote ties
resolve to the alphabetically smallest label. k larger than the training
set uses every training row.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..data_model import DType
from .base import Estimator, FeatureTable, numeric_matrix


class _KNNBase(Estimator):
    def __init__(self, k: int = 5):
        self.k = k
        self.X_: np.ndarray | None = None
        self.feature_names_: tuple[str, ...] | None = None

    def hyperparams(self) -> dict[str, Any]:
        return {"k": self.k}

    def _neighbor_targets(self, table: FeatureTable) -> list[np.ndarray]:
        table.check_schema(self.feature_names_,
                           tuple([DType.NUMERIC] * len(self.feature_names_)))
        X = numeric_matrix(table)
        k = min(self.k, len(self.X_))
        out = []
        for row in X:
            d = np.sqrt(((self.X_ - row) ** 2).sum(axis=1))
            order = np.argsort(d, kind="stable")  # stable: distance ties by index
            out.append(order[:k])
        return out


class KNNRegressor(_KNNBase):
    name = "knn_regressor"

    def __init__(self, k: int = 5):
        super().__init__(k)
        self.y_: np.ndarray | None = None

    def fit(self, table: FeatureTable, y: np.ndarray) -> "KNNRegressor":
        self.X_ = numeric_matrix(table)
        self.y_ = np.asarray(y, dtype=float)
        self.feature_names_ = table.names
        return self

    def predict(self, table: FeatureTable) -> np.ndarray:
        return np.array([float(self.y_[idx].mean())
                         for idx in self._neighbor_targets(table)])

    def state_dict(self) -> dict[str, Any]:
        return {"k": self.k, "X": [[float(v) for v in row] for row in self.X_],
                "y": [float(v) for v in self.y_],
                "feature_names": list(self.feature_names_)}

    def load_state(self, state: dict[str, Any]) -> None:
        self.k = state["k"]
        self.X_ = np.array(state["X"], dtype=float).reshape(len(state["X"]), -1)
        self.y_ = np.array(state["y"], dtype=float)
        self.feature_names_ = tuple(state["feature_names"])


class KNNClassifier(_KNNBase):
    name = "knn_classifier"

    def __init__(self, k: int = 5):
        super().__init__(k)
        self.y_: np.ndarray | None = None

    def fit(self, table: FeatureTable, y: np.ndarray) -> "KNNClassifier":
        self.X_ = numeric_matrix(table)
        self.y_ = np.asarray([str(v) for v in y], dtype=object)
        self.feature_names_ = table.names
        return self

    def predict(self, table: FeatureTable) -> np.ndarray:
        preds = []
        for idx in self._neighbor_targets(table):
            votes: dict[str, int] = {}
            for label in self.y_[idx]:
                votes[label] = votes.get(label, 0) + 1
            winner = min(votes, key=lambda c: (-votes[c], c))
            preds.append(winner)
        return np.array(preds, dtype=object)

    def state_dict(self) -> dict[str, Any]:
        return {"k": self.k, "X": [[float(v) for v in row] for row in self.X_],
                "y": [str(v) for v in self.y_],
                "feature_names": list(self.feature_names_)}

    def load_state(self, state: dict[str, Any]) -> None:
        self.k = state["k"]
        self.X_ = np.array(state["X"], dtype=float).reshape(len(state["X"]), -1)
        self.y_ = np.array(state["y"], dtype=object)
        self.feature_names_ = tuple(state["feature_names"])
