from __future__ import annotations

import numpy as np
import pytest

from tabpilot.data_model import Column, Dataset, DType


def make_numeric_dataset(name: str, arrays: dict[str, np.ndarray]) -> Dataset:
    cols = tuple(Column(n, DType.NUMERIC, tuple(float(v) for v in a))
                 for n, a in arrays.items())
    return Dataset(name=name, columns=cols)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
