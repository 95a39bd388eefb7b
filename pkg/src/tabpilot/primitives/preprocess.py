"""Preprocessing primitives: imputation, scaling, encoding, date expansion."""

from __future__ import annotations

from typing import Any

import numpy as np

from ..data_model import (
    DType,
    epoch_seconds,
    from_epoch_seconds,
)
from ..errors import NonNumericInput
from .base import FeatureTable, Preprocessor


def _mode(values: list) -> Any:
    counts: dict[Any, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return min(counts, key=lambda k: (-counts[k], str(k)))


class MeanImputer(Preprocessor):
    """Fill missing cells with a fit-time central value.

    Numeric columns use the mean, temporal the mean timestamp, categorical
    the most frequent category (ties to the alphabetically first). A column
    with no present values fills with 0, the epoch, or the empty string.
    """

    name = "mean_imputer"

    def __init__(self):
        self.fills_: list[Any] | None = None
        self.names_: tuple[str, ...] | None = None
        self.dtypes_: tuple[DType, ...] | None = None

    def fit(self, table: FeatureTable, y=None) -> "MeanImputer":
        fills = []
        for dtype, col in zip(table.dtypes, table.columns):
            present = [v for v in col if v is not None]
            if not present:
                fills.append(0.0 if dtype == DType.NUMERIC
                             else from_epoch_seconds(0) if dtype == DType.TEMPORAL
                             else "")
            elif dtype == DType.NUMERIC:
                fills.append(float(np.mean(present)))
            elif dtype == DType.TEMPORAL:
                mean_s = float(np.mean([epoch_seconds(t) for t in present]))
                fills.append(from_epoch_seconds(round(mean_s)))
            else:
                fills.append(_mode(present))
        self.fills_ = fills
        self.names_ = table.names
        self.dtypes_ = table.dtypes
        return self

    def transform(self, table: FeatureTable) -> FeatureTable:
        table.check_schema(self.names_, self.dtypes_)
        cols = tuple(tuple(fill if v is None else v for v in col)
                     for fill, col in zip(self.fills_, table.columns))
        return FeatureTable(table.names, table.dtypes, cols)

    def output_schema(self):
        return self.names_, self.dtypes_

    def state_dict(self) -> dict[str, Any]:
        fills = [epoch_seconds(f) if d == DType.TEMPORAL else f
                 for f, d in zip(self.fills_, self.dtypes_)]
        return {"names": list(self.names_), "dtypes": [d.value for d in self.dtypes_],
                "fills": fills}

    def load_state(self, state: dict[str, Any]) -> None:
        self.names_ = tuple(state["names"])
        self.dtypes_ = tuple(DType(d) for d in state["dtypes"])
        self.fills_ = [from_epoch_seconds(f) if d == DType.TEMPORAL else f
                       for f, d in zip(state["fills"], self.dtypes_)]


class ConstantImputer(Preprocessor):
    """Fill missing cells with one constant, coerced per column dtype."""

    name = "constant_imputer"

    def __init__(self, fill_value: Any = 0.0):
        self.fill_value = fill_value
        self.names_: tuple[str, ...] | None = None
        self.dtypes_: tuple[DType, ...] | None = None

    def hyperparams(self) -> dict[str, Any]:
        return {"fill_value": self.fill_value}

    def _coerced(self, dtype: DType) -> Any:
        if dtype == DType.NUMERIC:
            try:
                return float(self.fill_value)
            except (TypeError, ValueError):
                raise NonNumericInput(
                    f"constant_imputer fill value {self.fill_value!r} "
                    f"cannot fill a numeric column") from None
        if dtype == DType.TEMPORAL:
            return from_epoch_seconds(0) if not isinstance(self.fill_value, (int, float)) \
                else from_epoch_seconds(float(self.fill_value))
        return str(self.fill_value)

    def fit(self, table: FeatureTable, y=None) -> "ConstantImputer":
        self.names_ = table.names
        self.dtypes_ = table.dtypes
        return self

    def transform(self, table: FeatureTable) -> FeatureTable:
        table.check_schema(self.names_, self.dtypes_)
        cols = []
        for dtype, col in zip(table.dtypes, table.columns):
            if any(v is None for v in col):
                fill = self._coerced(dtype)
                col = tuple(fill if v is None else v for v in col)
            cols.append(col)
        return FeatureTable(table.names, table.dtypes, tuple(cols))

    def output_schema(self):
        return self.names_, self.dtypes_

    def state_dict(self) -> dict[str, Any]:
        return {"names": list(self.names_), "dtypes": [d.value for d in self.dtypes_],
                "fill_value": self.fill_value}

    def load_state(self, state: dict[str, Any]) -> None:
        self.names_ = tuple(state["names"])
        self.dtypes_ = tuple(DType(d) for d in state["dtypes"])
        self.fill_value = state["fill_value"]


class _NumericColumnwise(Preprocessor):
    """Base for scalers: numeric-only, no missing cells, per-column affine map."""

    def __init__(self):
        self.names_: tuple[str, ...] | None = None
        self.offsets_: np.ndarray | None = None
        self.scales_: np.ndarray | None = None

    def _fit_params(self, matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def fit(self, table: FeatureTable, y=None):
        for name, dtype, col in zip(table.names, table.dtypes, table.columns):
            if dtype != DType.NUMERIC:
                raise NonNumericInput(f"column {name!r} is {dtype.value}, expected numeric")
            if any(v is None for v in col):
                raise NonNumericInput(f"column {name!r} has missing values")
        matrix = np.array(table.columns, dtype=float).T if table.columns \
            else np.zeros((table.row_count, 0))
        self.names_ = table.names
        self.offsets_, self.scales_ = self._fit_params(matrix)
        return self

    def transform(self, table: FeatureTable) -> FeatureTable:
        table.check_schema(self.names_, tuple([DType.NUMERIC] * len(self.names_)))
        cols = []
        for j, col in enumerate(table.columns):
            if any(v is None for v in col):
                raise NonNumericInput(f"column {table.names[j]!r} has missing values")
            arr = (np.array(col, dtype=float) - self.offsets_[j]) / self.scales_[j]
            cols.append(tuple(float(v) for v in arr))
        return FeatureTable(table.names, table.dtypes, tuple(cols))

    def output_schema(self):
        return self.names_, tuple([DType.NUMERIC] * len(self.names_))

    def state_dict(self) -> dict[str, Any]:
        return {"names": list(self.names_),
                "offsets": [float(v) for v in self.offsets_],
                "scales": [float(v) for v in self.scales_]}

    def load_state(self, state: dict[str, Any]) -> None:
        self.names_ = tuple(state["names"])
        self.offsets_ = np.array(state["offsets"], dtype=float)
        self.scales_ = np.array(state["scales"], dtype=float)


class StandardScaler(_NumericColumnwise):
    """Center to zero mean, scale to unit population std (constant columns pass through centered)."""

    name = "standard_scaler"

    def _fit_params(self, matrix):
        means = matrix.mean(axis=0) if matrix.size else np.zeros(matrix.shape[1])
        stds = matrix.std(axis=0) if matrix.size else np.ones(matrix.shape[1])
        stds = np.where(stds == 0.0, 1.0, stds)
        return means, stds


class MinMaxScaler(_NumericColumnwise):
    """Map fit-time [min, max] to [0, 1]; constant columns map to 0."""

    name = "minmax_scaler"

    def _fit_params(self, matrix):
        if matrix.size == 0:
            return np.zeros(matrix.shape[1]), np.ones(matrix.shape[1])
        lo = matrix.min(axis=0)
        span = matrix.max(axis=0) - lo
        span = np.where(span == 0.0, 1.0, span)
        return lo, span


class OneHotEncoder(Preprocessor):
    """Replace each categorical column with indicator columns for fit-time categories.

    Categories are sorted for a stable output schema. Unseen categories and
    missing cells map to the all-zeros row. Non-categorical columns pass
    through in place.
    """

    name = "one_hot_encoder"

    def __init__(self):
        self.names_: tuple[str, ...] | None = None
        self.dtypes_: tuple[DType, ...] | None = None
        self.categories_: dict[str, tuple[str, ...]] | None = None

    def fit(self, table: FeatureTable, y=None) -> "OneHotEncoder":
        self.names_ = table.names
        self.dtypes_ = table.dtypes
        self.categories_ = {}
        for name, dtype, col in zip(table.names, table.dtypes, table.columns):
            if dtype == DType.CATEGORICAL:
                self.categories_[name] = tuple(sorted({v for v in col if v is not None}))
        return self

    def transform(self, table: FeatureTable) -> FeatureTable:
        table.check_schema(self.names_, self.dtypes_)
        names: list[str] = []
        dtypes: list[DType] = []
        cols: list[tuple] = []
        for name, dtype, col in zip(table.names, table.dtypes, table.columns):
            if dtype != DType.CATEGORICAL:
                names.append(name)
                dtypes.append(dtype)
                cols.append(col)
                continue
            for cat in self.categories_[name]:
                names.append(f"{name}={cat}")
                dtypes.append(DType.NUMERIC)
                cols.append(tuple(1.0 if v == cat else 0.0 for v in col))
        return FeatureTable(tuple(names), tuple(dtypes), tuple(cols))

    def output_schema(self):
        names: list[str] = []
        dtypes: list[DType] = []
        for name, dtype in zip(self.names_, self.dtypes_):
            if dtype != DType.CATEGORICAL:
                names.append(name)
                dtypes.append(dtype)
            else:
                for cat in self.categories_[name]:
                    names.append(f"{name}={cat}")
                    dtypes.append(DType.NUMERIC)
        return tuple(names), tuple(dtypes)

    def state_dict(self) -> dict[str, Any]:
        return {"names": list(self.names_), "dtypes": [d.value for d in self.dtypes_],
                "categories": {k: list(v) for k, v in self.categories_.items()}}

    def load_state(self, state: dict[str, Any]) -> None:
        self.names_ = tuple(state["names"])
        self.dtypes_ = tuple(DType(d) for d in state["dtypes"])
        self.categories_ = {k: tuple(v) for k, v in state["categories"].items()}


class DatetimeExpander(Preprocessor):
    """Replace each temporal column with 4 numeric columns: year, month, day, weekday.

    Weekday is 0 for Monday through 6 for Sunday. Missing timestamps expand
    to 4 missing cells. Non-temporal columns pass through in place.
    """

    name = "datetime_expander"

    PARTS = ("year", "month", "day", "weekday")

    def __init__(self):
        self.names_: tuple[str, ...] | None = None
        self.dtypes_: tuple[DType, ...] | None = None

    def fit(self, table: FeatureTable, y=None) -> "DatetimeExpander":
        self.names_ = table.names
        self.dtypes_ = table.dtypes
        return self

    def transform(self, table: FeatureTable) -> FeatureTable:
        table.check_schema(self.names_, self.dtypes_)
        names: list[str] = []
        dtypes: list[DType] = []
        cols: list[tuple] = []
        for name, dtype, col in zip(table.names, table.dtypes, table.columns):
            if dtype != DType.TEMPORAL:
                names.append(name)
                dtypes.append(dtype)
                cols.append(col)
                continue
            parts = {p: [] for p in self.PARTS}
            for v in col:
                if v is None:
                    for p in self.PARTS:
                        parts[p].append(None)
                else:
                    parts["year"].append(float(v.year))
                    parts["month"].append(float(v.month))
                    parts["day"].append(float(v.day))
                    parts["weekday"].append(float(v.weekday()))
            for p in self.PARTS:
                names.append(f"{name}_{p}")
                dtypes.append(DType.NUMERIC)
                cols.append(tuple(parts[p]))
        return FeatureTable(tuple(names), tuple(dtypes), tuple(cols))

    def output_schema(self):
        names: list[str] = []
        dtypes: list[DType] = []
        for name, dtype in zip(self.names_, self.dtypes_):
            if dtype != DType.TEMPORAL:
                names.append(name)
                dtypes.append(dtype)
            else:
                for p in self.PARTS:
                    names.append(f"{name}_{p}")
                    dtypes.append(DType.NUMERIC)
        return tuple(names), tuple(dtypes)

    def state_dict(self) -> dict[str, Any]:
        return {"names": list(self.names_), "dtypes": [d.value for d in self.dtypes_]}

    def load_state(self, state: dict[str, Any]) -> None:
        self.names_ = tuple(state["names"])
        self.dtypes_ = tuple(DType(d) for d in state["dtypes"])
