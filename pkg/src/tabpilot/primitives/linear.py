"""Linear estimators: least squares, ridge, lasso, and logistic regression.

All solvers are deterministic. Penalties never apply to the intercept.
``lambda`` scaling follows the averaged-loss convention, so hyperparameter
values mean the same thing regardless of training-set size:

    lasso     (1/2n)·||y − b − Xw||² + λ·||w||₁
    ridge     (1/2n)·||y − b − Xw||² + (λ/2)·||w||²
    logistic  (1/n)·Σ log-loss + (λ/2)·||w||²
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..data_model import DType
from .base import Estimator, FeatureTable, numeric_matrix


def _with_intercept(X: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((X.shape[0], 1)), X])


class LinearRegression(Estimator):
    """Ordinary least squares via the normal equations.

    A rank-deficient design matrix falls back to a ridge solve with
    lambda 1e-8 and sets ``singular_fallback_`` instead of failing; the
    search layer surfaces the flag as a warning.
    """

    name = "linear_regression"

    def __init__(self):
        self.intercept_: float | None = None
        self.coef_: np.ndarray | None = None
        self.feature_names_: tuple[str, ...] | None = None
        self.singular_fallback_: bool = False

    def fit(self, table: FeatureTable, y: np.ndarray) -> "LinearRegression":
        X = numeric_matrix(table)
        A = _with_intercept(X)
        gram = A.T @ A
        rhs = A.T @ np.asarray(y, dtype=float)
        if np.linalg.matrix_rank(A) < A.shape[1]:
            self.singular_fallback_ = True
            penalty = 1e-8 * len(y) * np.eye(A.shape[1])
            penalty[0, 0] = 0.0  # intercept unpenalized
            beta = np.linalg.solve(gram + penalty, rhs)
        else:
            beta = np.linalg.solve(gram, rhs)
        self.intercept_ = float(beta[0])
        self.coef_ = beta[1:]
        self.feature_names_ = table.names
        return self

    def predict(self, table: FeatureTable) -> np.ndarray:
        table.check_schema(self.feature_names_,
                           tuple([DType.NUMERIC] * len(self.feature_names_)))
        X = numeric_matrix(table)
        return X @ self.coef_ + self.intercept_

    def state_dict(self) -> dict[str, Any]:
        return {"intercept": self.intercept_, "coef": [float(c) for c in self.coef_],
                "feature_names": list(self.feature_names_),
                "singular_fallback": self.singular_fallback_}

    def load_state(self, state: dict[str, Any]) -> None:
        self.intercept_ = state["intercept"]
        self.coef_ = np.array(state["coef"], dtype=float)
        self.feature_names_ = tuple(state["feature_names"])
        self.singular_fallback_ = state["singular_fallback"]


class RidgeRegression(Estimator):
    """Closed-form ridge on centered data; intercept recovered afterwards."""

    name = "ridge_regression"

    def __init__(self, lam: float = 1.0):
        self.lam = lam
        self.intercept_: float | None = None
        self.coef_: np.ndarray | None = None
        self.feature_names_: tuple[str, ...] | None = None

    def hyperparams(self) -> dict[str, Any]:
        return {"lam": self.lam}

    def fit(self, table: FeatureTable, y: np.ndarray) -> "RidgeRegression":
        X = numeric_matrix(table)
        y = np.asarray(y, dtype=float)
        n = X.shape[0]
        x_mean = X.mean(axis=0)
        y_mean = y.mean()
        Xc = X - x_mean
        w = np.linalg.solve(Xc.T @ Xc + n * self.lam * np.eye(X.shape[1]),
                            Xc.T @ (y - y_mean))
        self.coef_ = w
        self.intercept_ = float(y_mean - x_mean @ w)
        self.feature_names_ = table.names
        return self

    def predict(self, table: FeatureTable) -> np.ndarray:
        table.check_schema(self.feature_names_,
                           tuple([DType.NUMERIC] * len(self.feature_names_)))
        return numeric_matrix(table) @ self.coef_ + self.intercept_

    def state_dict(self) -> dict[str, Any]:
        return {"lam": self.lam, "intercept": self.intercept_,
                "coef": [float(c) for c in self.coef_],
                "feature_names": list(self.feature_names_)}

    def load_state(self, state: dict[str, Any]) -> None:
        self.lam = state["lam"]
        self.intercept_ = state["intercept"]
        self.coef_ = np.array(state["coef"], dtype=float)
        self.feature_names_ = tuple(state["feature_names"])


class LassoRegression(Estimator):
    """L1-penalized least squares fit by cyclic coordinate descent.

    Sweeps stop when the largest coefficient change falls below ``tol``
    or after ``max_sweeps`` full passes.
    """

    name = "lasso_regression"

    def __init__(self, lam: float = 0.1, tol: float = 1e-6, max_sweeps: int = 10000):
        self.lam = lam
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.intercept_: float | None = None
        self.coef_: np.ndarray | None = None
        self.feature_names_: tuple[str, ...] | None = None
        self.n_sweeps_: int = 0
        self.converged_: bool = False

    def hyperparams(self) -> dict[str, Any]:
        return {"lam": self.lam}

    def fit(self, table: FeatureTable, y: np.ndarray) -> "LassoRegression":
        X = numeric_matrix(table)
        y = np.asarray(y, dtype=float)
        n, p = X.shape
        x_mean = X.mean(axis=0)
        y_mean = y.mean()
        Xc = X - x_mean
        yc = y - y_mean
        norms = (Xc * Xc).sum(axis=0)

        w = np.zeros(p)
        residual = yc.copy()
        threshold = n * self.lam
        self.converged_ = False
        sweeps = 0
        for sweeps in range(1, self.max_sweeps + 1):
            max_delta = 0.0
            for j in range(p):
                if norms[j] == 0.0:
                    continue
                rho = Xc[:, j] @ residual + norms[j] * w[j]
                new_w = np.sign(rho) * max(abs(rho) - threshold, 0.0) / norms[j]
                delta = new_w - w[j]
                if delta != 0.0:
                    residual -= Xc[:, j] * delta
                    w[j] = new_w
                    max_delta = max(max_delta, abs(delta))
            if max_delta < self.tol:
                self.converged_ = True
                break
        self.n_sweeps_ = sweeps
        self.coef_ = w
        self.intercept_ = float(y_mean - x_mean @ w)
        self.feature_names_ = table.names
        return self

    def predict(self, table: FeatureTable) -> np.ndarray:
        table.check_schema(self.feature_names_,
                           tuple([DType.NUMERIC] * len(self.feature_names_)))
        return numeric_matrix(table) @ self.coef_ + self.intercept_

    def state_dict(self) -> dict[str, Any]:
        return {"lam": self.lam, "intercept": self.intercept_,
                "coef": [float(c) for c in self.coef_],
                "feature_names": list(self.feature_names_),
                "n_sweeps": self.n_sweeps_, "converged": self.converged_}

    def load_state(self, state: dict[str, Any]) -> None:
        self.lam = state["lam"]
        self.intercept_ = state["intercept"]
        self.coef_ = np.array(state["coef"], dtype=float)
        self.feature_names_ = tuple(state["feature_names"])
        self.n_sweeps_ = state["n_sweeps"]
        self.converged_ = state["converged"]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticRegression(Estimator):
    """One-vs-rest logistic regression trained by full-batch gradient descent.

    The step size 1/L with L = sigma_max(AᵀA)/(4n) + lambda bounds the loss
    curvature, so every step is guaranteed not to increase the training loss;
    ``loss_history_`` records it per binary subproblem for verification.
    """

    name = "logistic_regression"

    def __init__(self, lam: float = 0.1, tol: float = 1e-6, max_iter: int = 500):
        self.lam = lam
        self.tol = tol
        self.max_iter = max_iter
        self.classes_: tuple[str, ...] | None = None
        self.intercepts_: np.ndarray | None = None
        self.coefs_: np.ndarray | None = None  # (n_classes, n_features)
        self.feature_names_: tuple[str, ...] | None = None
        self.loss_history_: list[list[float]] = []

    def hyperparams(self) -> dict[str, Any]:
        return {"lam": self.lam}

    def _binary_loss(self, z: np.ndarray, t: np.ndarray, w: np.ndarray) -> float:
        # log(1 + e^z) - t*z, numerically stable via logaddexp
        per_row = np.logaddexp(0.0, z) - t * z
        return float(per_row.mean() + 0.5 * self.lam * (w @ w))

    def fit(self, table: FeatureTable, y: np.ndarray) -> "LogisticRegression":
        X = numeric_matrix(table)
        labels = np.asarray([str(v) for v in y])
        classes = tuple(sorted(set(labels)))
        n, p = X.shape

        A = _with_intercept(X)
        sigma_max = float(np.linalg.norm(A, 2)) if A.size else 0.0
        lipschitz = sigma_max ** 2 / (4.0 * n) + self.lam
        step = 1.0 / lipschitz if lipschitz > 0 else 1.0

        intercepts = np.zeros(len(classes))
        coefs = np.zeros((len(classes), p))
        self.loss_history_ = []
        for ci, cls in enumerate(classes):
            t = (labels == cls).astype(float)
            w = np.zeros(p)
            b = 0.0
            history = [self._binary_loss(X @ w + b, t, w)]
            for _ in range(self.max_iter):
                z = X @ w + b
                err = _sigmoid(z) - t
                grad_w = X.T @ err / n + self.lam * w
                grad_b = float(err.mean())
                w = w - step * grad_w
                b = b - step * grad_b
                history.append(self._binary_loss(X @ w + b, t, w))
                if max(np.max(np.abs(grad_w), initial=0.0), abs(grad_b)) < self.tol:
                    break
            intercepts[ci] = b
            coefs[ci] = w
            self.loss_history_.append(history)

        self.classes_ = classes
        self.intercepts_ = intercepts
        self.coefs_ = coefs
        self.feature_names_ = table.names
        return self

    def decision_scores(self, table: FeatureTable) -> np.ndarray:
        table.check_schema(self.feature_names_,
                           tuple([DType.NUMERIC] * len(self.feature_names_)))
        X = numeric_matrix(table)
        return X @ self.coefs_.T + self.intercepts_

    def predict(self, table: FeatureTable) -> np.ndarray:
        scores = self.decision_scores(table)
        # argmax takes the first maximum: ties go to the alphabetically
        # smallest class because classes_ is sorted
        winners = np.argmax(scores, axis=1)
        return np.array([self.classes_[i] for i in winners], dtype=object)

    def state_dict(self) -> dict[str, Any]:
        return {"lam": self.lam, "classes": list(self.classes_),
                "intercepts": [float(b) for b in self.intercepts_],
                "coefs": [[float(c) for c in row] for row in self.coefs_],
                "feature_names": list(self.feature_names_)}

    def load_state(self, state: dict[str, Any]) -> None:
        self.lam = state["lam"]
        self.classes_ = tuple(state["classes"])
        self.intercepts_ = np.array(state["intercepts"], dtype=float)
        self.coefs_ = np.array(state["coefs"], dtype=float)
        self.feature_names_ = tuple(state["feature_names"])
        self.loss_history_ = []
