"""The fixed primitive catalog: descriptors, construction, serialization.

Every primitive the system can ever place in a pipeline is declared here,
with its role, task compatibility, and hyperparameter ranges. The search
layer enumerates ``search_grid`` points; API callers may pass any in-range
value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import HyperparamOutOfRange, UnknownPrimitive
from ..problem_spec import TaskType
from .base import Estimator, Preprocessor
from .baselines import MajorityClassBaseline, MeanBaseline
from .linear import LassoRegression, LinearRegression, LogisticRegression, RidgeRegression
from .neighbors import KNNClassifier, KNNRegressor
from .preprocess import (
    ConstantImputer,
    DatetimeExpander,
    MeanImputer,
    MinMaxScaler,
    OneHotEncoder,
    StandardScaler,
)
from .tree import DecisionTreeClassifier, DecisionTreeRegressor

LAMBDA_LO = 1e-4
LAMBDA_HI = 10.0
# 11 log-spaced grid points spanning the lambda range
LAMBDA_GRID = tuple(float(v) for v in np.logspace(-4, 1, 11))
MAX_DEPTH_CHOICES = tuple(range(2, 11))
MIN_LEAF_CHOICES = (1, 5, 20)
K_CHOICES = (1, 3, 5, 11, 25)


@dataclass(frozen=True)
class HyperparamRange:
    name: str
    kind: str  # log_float | int_choice
    lo: float | None = None
    hi: float | None = None
    choices: tuple = ()
    default: Any = None
    grid: tuple = ()

    def check(self, value: Any) -> Any:
        if self.kind == "any":
            return value
        if self.kind == "log_float":
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise HyperparamOutOfRange(f"{self.name}={value!r} is not a number")
            v = float(value)
            if not (self.lo <= v <= self.hi):
                raise HyperparamOutOfRange(
                    f"{self.name}={v} outside [{self.lo}, {self.hi}]")
            return v
        if value not in self.choices:
            raise HyperparamOutOfRange(
                f"{self.name}={value!r} not in {sorted(self.choices)}")
        return value

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"name": self.name, "kind": self.kind, "default": self.default}
        if self.kind == "log_float":
            d["lo"] = self.lo
            d["hi"] = self.hi
        else:
            d["choices"] = list(self.choices)
        return d


def _lambda_range(default: float) -> HyperparamRange:
    return HyperparamRange("lam", "log_float", lo=LAMBDA_LO, hi=LAMBDA_HI,
                           default=default, grid=LAMBDA_GRID)


@dataclass(frozen=True)
class PrimitiveDescriptor:
    name: str
    role: str  # preprocessor | estimator
    factory: type
    tasks: tuple[TaskType, ...] = ()  # estimators only
    hyperparams: tuple[HyperparamRange, ...] = ()
    is_baseline: bool = False
    output_note: str | None = None

    def make(self, hyperparams: dict[str, Any] | None = None) -> Preprocessor | Estimator:
        given = dict(hyperparams or {})
        kwargs = {}
        for hp in self.hyperparams:
            if hp.name in given:
                kwargs[hp.name] = hp.check(given.pop(hp.name))
            else:
                kwargs[hp.name] = hp.default
        if given:
            raise HyperparamOutOfRange(
                f"{self.name} does not take hyperparameters {sorted(given)}")
        return self.factory(**kwargs)

    def search_grid(self) -> list[dict[str, Any]]:
        """Every hyperparameter combination the search may try, in order."""
        combos: list[dict[str, Any]] = [{}]
        for hp in self.hyperparams:
            values = hp.grid or hp.choices or (hp.default,)
            combos = [dict(c, **{hp.name: v}) for c in combos for v in values]
        return combos

    def default_hyperparams(self) -> dict[str, Any]:
        return {hp.name: hp.default for hp in self.hyperparams}

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "role": self.role,
            "tasks": [t.value for t in self.tasks],
            "hyperparams": [hp.to_dict() for hp in self.hyperparams],
            "is_baseline": self.is_baseline,
            "output_note": self.output_note,
        }


_DESCRIPTORS: tuple[PrimitiveDescriptor, ...] = (
    PrimitiveDescriptor("mean_imputer", "preprocessor", MeanImputer),
    PrimitiveDescriptor(
        "constant_imputer", "preprocessor", ConstantImputer,
        hyperparams=(HyperparamRange("fill_value", "any", choices=(), default=0.0),)),
    PrimitiveDescriptor("standard_scaler", "preprocessor", StandardScaler),
    PrimitiveDescriptor("minmax_scaler", "preprocessor", MinMaxScaler),
    PrimitiveDescriptor("one_hot_encoder", "preprocessor", OneHotEncoder),
    PrimitiveDescriptor(
        "datetime_expander", "preprocessor", DatetimeExpander,
        output_note="4 numeric columns per temporal input: year, month, day, weekday"),
    PrimitiveDescriptor(
        "linear_regression", "estimator", LinearRegression,
        tasks=(TaskType.REGRESSION,)),
    PrimitiveDescriptor(
        "ridge_regression", "estimator", RidgeRegression,
        tasks=(TaskType.REGRESSION,), hyperparams=(_lambda_range(1.0),)),
    PrimitiveDescriptor(
        "lasso_regression", "estimator", LassoRegression,
        tasks=(TaskType.REGRESSION,), hyperparams=(_lambda_range(0.1),)),
    PrimitiveDescriptor(
        "decision_tree_regressor", "estimator", DecisionTreeRegressor,
        tasks=(TaskType.REGRESSION,),
        hyperparams=(
            HyperparamRange("max_depth", "int_choice", choices=MAX_DEPTH_CHOICES, default=6),
            HyperparamRange("min_leaf", "int_choice", choices=MIN_LEAF_CHOICES, default=5),
        )),
    PrimitiveDescriptor(
        "knn_regressor", "estimator", KNNRegressor,
        tasks=(TaskType.REGRESSION,),
        hyperparams=(HyperparamRange("k", "int_choice", choices=K_CHOICES, default=5),)),
    PrimitiveDescriptor(
        "logistic_regression", "estimator", LogisticRegression,
        tasks=(TaskType.CLASSIFICATION,), hyperparams=(_lambda_range(0.1),)),
    PrimitiveDescriptor(
        "decision_tree_classifier", "estimator", DecisionTreeClassifier,
        tasks=(TaskType.CLASSIFICATION,),
        hyperparams=(
            HyperparamRange("max_depth", "int_choice", choices=MAX_DEPTH_CHOICES, default=6),
            HyperparamRange("min_leaf", "int_choice", choices=MIN_LEAF_CHOICES, default=5),
        )),
    PrimitiveDescriptor(
        "knn_classifier", "estimator", KNNClassifier,
        tasks=(TaskType.CLASSIFICATION,),
        hyperparams=(HyperparamRange("k", "int_choice", choices=K_CHOICES, default=5),)),
    PrimitiveDescriptor(
        "majority_class_baseline", "estimator", MajorityClassBaseline,
        tasks=(TaskType.CLASSIFICATION,), is_baseline=True),
    PrimitiveDescriptor(
        "mean_baseline", "estimator", MeanBaseline,
        tasks=(TaskType.REGRESSION,), is_baseline=True),
)

_BY_NAME = {d.name: d for d in _DESCRIPTORS}


def registry() -> list[PrimitiveDescriptor]:
    return list(_DESCRIPTORS)


def descriptor(name: str) -> PrimitiveDescriptor:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownPrimitive(f"unknown primitive {name!r}") from None


def make_primitive(name: str, hyperparams: dict[str, Any] | None = None):
    return descriptor(name).make(hyperparams)


def estimators_for(task: TaskType, include_baselines: bool = True) -> list[PrimitiveDescriptor]:
    out = [d for d in _DESCRIPTORS if d.role == "estimator" and task in d.tasks]
    if not include_baselines:
        out = [d for d in out if not d.is_baseline]
    return out


def fitted_to_dict(primitive: Preprocessor | Estimator) -> dict[str, Any]:
    return {"name": primitive.name, "hyperparams": primitive.hyperparams(),
            "state": primitive.state_dict()}


def fitted_from_dict(doc: dict[str, Any]) -> Preprocessor | Estimator:
    primitive = make_primitive(doc["name"], doc.get("hyperparams"))
    primitive.load_state(doc["state"])
    return primitive
