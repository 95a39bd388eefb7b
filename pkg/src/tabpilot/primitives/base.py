"""Shared types for the primitive library.

Primitives exchange data as immutable column-major ``FeatureTable`` objects
so dtype information survives the whole chain; estimators convert to a dense
numpy matrix at the last moment and reject anything non-numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..data_model import Column, Dataset, DType
from ..errors import NonNumericInput, SchemaMismatch


@dataclass(frozen=True)
class FeatureTable:
    names: tuple[str, ...]
    dtypes: tuple[DType, ...]
    columns: tuple[tuple, ...]  # column-major; None marks a missing cell

    def __post_init__(self):
        if len(self.names) != len(self.dtypes) or len(self.names) != len(self.columns):
            raise ValueError("names, dtypes, and columns must align")
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise ValueError("ragged feature table")

    @property
    def row_count(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def column(self, name: str) -> tuple:
        return self.columns[self.names.index(name)]

    def dtype_of(self, name: str) -> DType:
        return self.dtypes[self.names.index(name)]

    def check_schema(self, names: Sequence[str], dtypes: Sequence[DType]) -> None:
        """Require the fit-time schema; report missing/extra names on failure."""
        if tuple(self.names) == tuple(names) and tuple(self.dtypes) == tuple(dtypes):
            return
        missing = [n for n in names if n not in self.names]
        extra = [n for n in self.names if n not in names]
        if not missing and not extra:
            changed = [n for n, d1, d2 in zip(names, dtypes, self.dtypes) if d1 != d2]
            raise SchemaMismatch([], [], f"column dtypes changed: {changed}")
        raise SchemaMismatch(missing, extra)


def table_from_dataset(dataset: Dataset, names: Sequence[str],
                       rows: Sequence[int] | None = None) -> FeatureTable:
    cols = []
    dtypes = []
    for name in names:
        col = dataset.column(name)
        dtypes.append(col.dtype)
        values = col.values if rows is None else tuple(col.values[i] for i in rows)
        cols.append(values)
    return FeatureTable(tuple(names), tuple(dtypes), tuple(cols))


def numeric_matrix(table: FeatureTable) -> np.ndarray:
    """Dense float64 design matrix; rejects non-numeric dtypes and missing cells."""
    for name, dtype, col in zip(table.names, table.dtypes, table.columns):
        if dtype != DType.NUMERIC:
            raise NonNumericInput(f"column {name!r} is {dtype.value}, expected numeric")
        if any(v is None for v in col):
            raise NonNumericInput(f"column {name!r} has missing values")
    if not table.columns:
        return np.zeros((table.row_count, 0))
    return np.array(table.columns, dtype=float).T


def table_from_matrix(matrix: np.ndarray, names: Sequence[str]) -> FeatureTable:
    cols = tuple(tuple(float(v) for v in matrix[:, j]) for j in range(matrix.shape[1]))
    return FeatureTable(tuple(names), tuple([DType.NUMERIC] * len(names)), cols)


class Preprocessor:
    """Base for fit/transform primitives. Subclasses set ``name`` and state."""

    name: str = ""

    def hyperparams(self) -> dict[str, Any]:
        return {}

    def fit(self, table: FeatureTable, y=None) -> "Preprocessor":
        raise NotImplementedError

    def transform(self, table: FeatureTable) -> FeatureTable:
        raise NotImplementedError

    def output_schema(self) -> tuple[tuple[str, ...], tuple[DType, ...]]:
        raise NotImplementedError

    def state_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    def load_state(self, state: dict[str, Any]) -> None:
        raise NotImplementedError


class Estimator:
    """Base for fit/predict primitives."""

    name: str = ""

    def hyperparams(self) -> dict[str, Any]:
        return {}

    def fit(self, table: FeatureTable, y: np.ndarray) -> "Estimator":
        raise NotImplementedError

    def predict(self, table: FeatureTable) -> np.ndarray:
        raise NotImplementedError

    def state_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    def load_state(self, state: dict[str, Any]) -> None:
        raise NotImplementedError
