"""Decision trees for regression and classification.

Split search sweeps each feature in sorted order with cumulative sums, so a
node costs O(p·n log n). Determinism rules: the best split is the one with
the strictly largest gain, ties resolved to the lowest feature index and
then the lowest threshold; thresholds are midpoints between distinct
neighboring values.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..data_model import DType
from .base import Estimator, FeatureTable, numeric_matrix

MIN_GAIN = 1e-12


def _best_split_regression(X: np.ndarray, y: np.ndarray, min_leaf: int):
    """Return (feature, threshold, gain) maximizing SSE reduction, or None."""
    n = len(y)
    total_sum = y.sum()
    total_sq = (y * y).sum()
    sse_parent = total_sq - total_sum * total_sum / n
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ys = y[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        # split after position i (1-based left size); both sides >= min_leaf
        sizes = np.arange(1, n)
        valid = (sizes >= min_leaf) & (n - sizes >= min_leaf) & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        left_sum = csum[:-1]
        left_sq = csq[:-1]
        sse_left = left_sq - left_sum * left_sum / sizes
        right_sum = total_sum - left_sum
        right_sq = total_sq - left_sq
        sse_right = right_sq - right_sum * right_sum / (n - sizes)
        gains = np.where(valid, sse_parent - (sse_left + sse_right), -np.inf)
        i = int(np.argmax(gains))  # first max = lowest threshold
        if gains[i] > MIN_GAIN and (best is None or gains[i] > best[2]):
            best = (j, float((xs[i] + xs[i + 1]) / 2.0), float(gains[i]))
    return best


def _best_split_gini(X: np.ndarray, y_codes: np.ndarray, n_classes: int, min_leaf: int):
    """Return (feature, threshold, gain) maximizing Gini impurity decrease."""
    n = len(y_codes)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y_codes] = 1.0
    total = onehot.sum(axis=0)
    gini_parent = 1.0 - ((total / n) ** 2).sum()
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        counts = np.cumsum(onehot[order], axis=0)[:-1]  # left counts per split
        sizes = np.arange(1, n, dtype=float)
        valid = (sizes >= min_leaf) & (n - sizes >= min_leaf) & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        right = total - counts
        gini_left = 1.0 - ((counts / sizes[:, None]) ** 2).sum(axis=1)
        gini_right = 1.0 - ((right / (n - sizes)[:, None]) ** 2).sum(axis=1)
        weighted = (sizes / n) * gini_left + ((n - sizes) / n) * gini_right
        gains = np.where(valid, gini_parent - weighted, -np.inf)
        i = int(np.argmax(gains))
        if gains[i] > MIN_GAIN and (best is None or gains[i] > best[2]):
            best = (j, float((xs[i] + xs[i + 1]) / 2.0), float(gains[i]))
    return best


def _tree_depth(node: dict[str, Any]) -> int:
    if node["kind"] == "leaf":
        return 0
    return 1 + max(_tree_depth(node["left"]), _tree_depth(node["right"]))


class _TreeBase(Estimator):
    def __init__(self, max_depth: int = 6, min_leaf: int = 5):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.root_: dict[str, Any] | None = None
        self.feature_names_: tuple[str, ...] | None = None

    def hyperparams(self) -> dict[str, Any]:
        return {"max_depth": self.max_depth, "min_leaf": self.min_leaf}

    def _leaf(self, y: np.ndarray) -> dict[str, Any]:
        raise NotImplementedError

    def _split(self, X: np.ndarray, y: np.ndarray):
        raise NotImplementedError

    def _build(self, X: np.ndarray, y: np.ndarray, depth: int) -> dict[str, Any]:
        if depth >= self.max_depth or len(y) < 2 * self.min_leaf:
            return self._leaf(y)
        found = self._split(X, y)
        if found is None:
            return self._leaf(y)
        j, threshold, _ = found
        mask = X[:, j] <= threshold
        return {
            "kind": "split",
            "feature": int(j),
            "threshold": threshold,
            "samples": len(y),
            "left": self._build(X[mask], y[mask], depth + 1),
            "right": self._build(X[~mask], y[~mask], depth + 1),
        }

    def _fit_matrix(self, table: FeatureTable, y: np.ndarray) -> np.ndarray:
        X = numeric_matrix(table)
        self.feature_names_ = table.names
        return X

    def depth(self) -> int:
        return _tree_depth(self.root_)

    def _predict_row(self, node: dict[str, Any], row: np.ndarray):
        while node["kind"] == "split":
            node = node["left"] if row[node["feature"]] <= node["threshold"] else node["right"]
        return node["value"]

    def predict(self, table: FeatureTable) -> np.ndarray:
        table.check_schema(self.feature_names_,
                           tuple([DType.NUMERIC] * len(self.feature_names_)))
        X = numeric_matrix(table)
        return np.array([self._predict_row(self.root_, row) for row in X],
                        dtype=object if self._classifier else float)

    def state_dict(self) -> dict[str, Any]:
        return {"max_depth": self.max_depth, "min_leaf": self.min_leaf,
                "root": self.root_, "feature_names": list(self.feature_names_)}

    def load_state(self, state: dict[str, Any]) -> None:
        self.max_depth = state["max_depth"]
        self.min_leaf = state["min_leaf"]
        self.root_ = state["root"]
        self.feature_names_ = tuple(state["feature_names"])

    _classifier = False


class DecisionTreeRegressor(_TreeBase):
    """Variance-reduction tree; leaves predict the training mean."""

    name = "decision_tree_regressor"

    def _leaf(self, y: np.ndarray) -> dict[str, Any]:
        return {"kind": "leaf", "value": float(y.mean()), "samples": len(y)}

    def _split(self, X: np.ndarray, y: np.ndarray):
        return _best_split_regression(X, y, self.min_leaf)

    def fit(self, table: FeatureTable, y: np.ndarray) -> "DecisionTreeRegressor":
        X = self._fit_matrix(table, y)
        self.root_ = self._build(X, np.asarray(y, dtype=float), depth=0)
        return self


class DecisionTreeClassifier(_TreeBase):
    """Gini-impurity tree; leaves predict the majority class.

    Majority ties resolve to the alphabetically smallest label.
    """

    name = "decision_tree_classifier"
    _classifier = True

    def __init__(self, max_depth: int = 6, min_leaf: int = 5):
        super().__init__(max_depth, min_leaf)
        self.classes_: tuple[str, ...] | None = None

    def _leaf(self, y: np.ndarray) -> dict[str, Any]:
        counts = np.bincount(y, minlength=len(self.classes_))
        majority = int(np.argmax(counts))  # first max = smallest label
        return {"kind": "leaf", "value": self.classes_[majority], "samples": len(y),
                "counts": [int(c) for c in counts]}

    def _split(self, X: np.ndarray, y: np.ndarray):
        return _best_split_gini(X, y, len(self.classes_), self.min_leaf)

    def fit(self, table: FeatureTable, y: np.ndarray) -> "DecisionTreeClassifier":
        X = self._fit_matrix(table, y)
        labels = np.asarray([str(v) for v in y])
        self.classes_ = tuple(sorted(set(labels)))
        index = {c: i for i, c in enumerate(self.classes_)}
        codes = np.array([index[v] for v in labels], dtype=int)
        self.root_ = self._build(X, codes, depth=0)
        return self

    def state_dict(self) -> dict[str, Any]:
        state = super().state_dict()
        state["classes"] = list(self.classes_)
        return state

    def load_state(self, state: dict[str, Any]) -> None:
        super().load_state(state)
        self.classes_ = tuple(state["classes"])
