"""Closed library of preprocessing and learning primitives."""

from .base import Estimator, FeatureTable, Preprocessor, numeric_matrix, table_from_dataset
from .registry import (
    PrimitiveDescriptor,
    descriptor,
    estimators_for,
    fitted_from_dict,
    fitted_to_dict,
    make_primitive,
    registry,
)

__all__ = [
    "Estimator",
    "FeatureTable",
    "Preprocessor",
    "PrimitiveDescriptor",
    "descriptor",
    "estimators_for",
    "fitted_from_dict",
    "fitted_to_dict",
    "make_primitive",
    "numeric_matrix",
    "registry",
    "table_from_dataset",
]
