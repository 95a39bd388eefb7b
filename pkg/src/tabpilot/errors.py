"""Exception types shared across the engine.

Every error carries a stable machine-readable ``code`` so the HTTP layer can
map failures one-to-one without string matching.
"""

from __future__ import annotations


class TabpilotError(Exception):
    """Base class for all anticipated engine failures."""

    code = "ENGINE_ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


# -- data_model ------------------------------------------------------------


class ParseError(TabpilotError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, row_index: int | None = None):
        super().__init__(message)
        self.row_index = row_index


class EmptyDataset(TabpilotError):
    code = "EMPTY_DATASET"


class ColumnNotFound(TabpilotError):
    code = "COLUMN_NOT_FOUND"

    def __init__(self, name: str):
        super().__init__(f"unknown column: {name!r}")
        self.name = name


class InvalidPrepAction(TabpilotError):
    code = "INVALID_PREP_ACTION"


# -- problem_spec ----------------------------------------------------------


class SchemaError(TabpilotError):
    """Malformed problem-spec JSON; ``path`` points at the offending field."""

    code = "SCHEMA_ERROR"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnsupportedTaskType(TabpilotError):
    code = "UNSUPPORTED_TASK_TYPE"


class TargetNotFound(TabpilotError):
    code = "TARGET_NOT_FOUND"

    def __init__(self, name: str):
        super().__init__(f"target column {name!r} not in dataset")
        self.name = name


class FeatureNotFound(TabpilotError):
    code = "FEATURE_NOT_FOUND"

    def __init__(self, name: str, detail: str | None = None):
        super().__init__(detail or f"feature column {name!r} not in dataset")
        self.name = name


class TargetInFeatures(TabpilotError):
    code = "TARGET_IN_FEATURES"


class TaskTargetMismatch(TabpilotError):
    code = "TASK_TARGET_MISMATCH"


class MetricTaskMismatch(TabpilotError):
    code = "METRIC_TASK_MISMATCH"


class EmptyFeatures(TabpilotError):
    code = "EMPTY_FEATURES"


class UnsupportedFeatureDtype(TabpilotError):
    code = "UNSUPPORTED_FEATURE_DTYPE"

    def __init__(self, name: str, dtype: str):
        super().__init__(f"feature {name!r} has dtype {dtype}, which no primitive consumes")
        self.name = name


# -- primitives / pipeline ---------------------------------------------------


class UnknownPrimitive(TabpilotError):
    code = "UNKNOWN_PRIMITIVE"


class HyperparamOutOfRange(TabpilotError):
    code = "HYPERPARAM_OUT_OF_RANGE"


class NonNumericInput(TabpilotError):
    code = "NON_NUMERIC_INPUT"


class NotFitted(TabpilotError):
    code = "NOT_FITTED"


class SchemaMismatch(TabpilotError):
    code = "SCHEMA_MISMATCH"

    def __init__(self, missing: list[str], extra: list[str], detail: str | None = None):
        msg = detail or f"schema mismatch: missing columns {missing}, extra columns {extra}"
        super().__init__(msg)
        self.missing = missing
        self.extra = extra


class InvalidPipelineStructure(TabpilotError):
    code = "INVALID_PIPELINE_STRUCTURE"


# -- evaluation --------------------------------------------------------------


class UndefinedMetric(TabpilotError):
    code = "UNDEFINED_METRIC"


class TooFewRows(TabpilotError):
    code = "TOO_FEW_ROWS"


# -- search ------------------------------------------------------------------


class UnknownMetric(TabpilotError):
    code = "UNKNOWN_METRIC"


class NoScoredSolutions(TabpilotError):
    code = "NO_SCORED_SOLUTIONS"


# -- explain -----------------------------------------------------------------


class WrongTaskType(TabpilotError):
    code = "WRONG_TASK_TYPE"


# -- augment -----------------------------------------------------------------


class StaleCandidate(TabpilotError):
    code = "STALE_CANDIDATE"


# -- service -----------------------------------------------------------------


class NotFound(TabpilotError):
    """Unknown session/dataset/problem/run/solution id; maps to HTTP 404."""

    code = "NOT_FOUND"

    def __init__(self, kind: str, ident: str):
        super().__init__(f"{kind} {ident!r} not found")
        self.code = f"{kind.upper()}_NOT_FOUND"
        self.kind = kind
        self.ident = ident
