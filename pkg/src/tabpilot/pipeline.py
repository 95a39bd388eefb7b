"""Pipeline assembly, execution, serialization, and structural diffing.

A pipeline is a linear chain: zero or more preprocessors, then exactly one
estimator. Its id is a content hash of the step list, so structurally equal
pipelines share an id and the search can deduplicate candidates for free.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .data_model import Dataset
from .errors import InvalidPipelineStructure, TabpilotError, WrongTaskType
from .primitives import table_from_dataset
from .primitives.base import Estimator, FeatureTable, Preprocessor
from .primitives.registry import descriptor, fitted_from_dict, fitted_to_dict
from .problem_spec import TaskType, ValidatedSpec


@dataclass(frozen=True)
class PrimitiveSpec:
    """One pipeline step: a registry name plus concrete hyperparameters."""

    name: str
    hyperparams: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        d = descriptor(self.name)  # raises UnknownPrimitive
        declared = {hp.name for hp in d.hyperparams}
        object.__setattr__(self, "hyperparams",
                           tuple(sorted(self.hyperparams, key=lambda kv: kv[0])))
        for key, value in self.hyperparams:
            if key not in declared:
                raise InvalidPipelineStructure(
                    f"{self.name} has no hyperparameter {key!r}")
        # range-check by building the full dict once
        d.make(dict(self.hyperparams))

    @property
    def role(self) -> str:
        return descriptor(self.name).role

    def hyperparam_dict(self) -> dict[str, Any]:
        return dict(self.hyperparams)

    def make(self):
        return descriptor(self.name).make(self.hyperparam_dict())

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "hyperparams": self.hyperparam_dict()}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PrimitiveSpec":
        return cls(name=d["name"], hyperparams=tuple((d.get("hyperparams") or {}).items()))


def step(name: str, **hyperparams: Any) -> PrimitiveSpec:
    return PrimitiveSpec(name=name, hyperparams=tuple(hyperparams.items()))


def _content_id(steps: Sequence[PrimitiveSpec]) -> str:
    canonical = json.dumps([s.to_dict() for s in steps], sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class Pipeline:
    steps: tuple[PrimitiveSpec, ...]
    id: str = ""

    def __post_init__(self):
        if not self.steps:
            raise InvalidPipelineStructure("pipeline has no steps")
        roles = [s.role for s in self.steps]
        if roles[-1] != "estimator":
            raise InvalidPipelineStructure("last step must be an estimator")
        if "estimator" in roles[:-1]:
            raise InvalidPipelineStructure("estimator must be the single final step")
        object.__setattr__(self, "id", _content_id(self.steps))

    @property
    def preprocessors(self) -> tuple[PrimitiveSpec, ...]:
        return self.steps[:-1]

    @property
    def estimator(self) -> PrimitiveSpec:
        return self.steps[-1]

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Pipeline":
        return cls(steps=tuple(PrimitiveSpec.from_dict(s) for s in d["steps"]))


def make_pipeline(*specs: PrimitiveSpec) -> Pipeline:
    return Pipeline(steps=tuple(specs))


def _annotate(exc: Exception, index: int, name: str) -> Exception:
    exc.step_index = index
    exc.step_name = name
    prefix = f"step {index} ({name}): "
    if isinstance(exc, TabpilotError) and not exc.message.startswith(prefix):
        exc.message = prefix + exc.message
        exc.args = (exc.message,)
    return exc


def target_values(dataset: Dataset, spec: ValidatedSpec,
                  rows: Sequence[int]) -> np.ndarray:
    col = dataset.column(spec.target)
    values = [col.values[i] for i in rows]
    if any(v is None for v in values):
        raise InvalidPipelineStructure("row subset includes rows with missing target")
    if spec.task_type == TaskType.REGRESSION:
        return np.array([float(v) for v in values])
    return np.array([str(v) for v in values], dtype=object)


@dataclass
class FittedPipeline:
    pipeline: Pipeline
    fitted_steps: list
    feature_names: tuple[str, ...]
    task_type: TaskType

    def transform_prefix(self, table: FeatureTable, upto: int | None = None) -> FeatureTable:
        """Run preprocessors [0, upto) on a table; full prefix by default."""
        end = len(self.fitted_steps) - 1 if upto is None else upto
        for i in range(end):
            fitted = self.fitted_steps[i]
            try:
                table = fitted.transform(table)
            except Exception as exc:
                raise _annotate(exc, i, fitted.name)
        return table

    def predict_suffix(self, table: FeatureTable, start: int) -> np.ndarray:
        """Run steps [start, end] on an already-partially-transformed table."""
        for i in range(start, len(self.fitted_steps) - 1):
            fitted = self.fitted_steps[i]
            try:
                table = fitted.transform(table)
            except Exception as exc:
                raise _annotate(exc, i, fitted.name)
        estimator = self.fitted_steps[-1]
        try:
            return estimator.predict(table)
        except Exception as exc:
            raise _annotate(exc, len(self.fitted_steps) - 1, estimator.name)

    def predict(self, table: FeatureTable) -> np.ndarray:
        if table.row_count == 0:
            return np.array([], dtype=float if self.task_type == TaskType.REGRESSION
                            else object)
        return self.predict_suffix(self.transform_prefix(table), len(self.fitted_steps) - 1)

    def predict_dataset(self, dataset: Dataset, rows: Sequence[int] | None = None) -> np.ndarray:
        table = table_from_dataset(dataset, self.feature_names, rows)
        return self.predict(table)

    def to_dict(self) -> dict[str, Any]:
        return {
            "pipeline": self.pipeline.to_dict(),
            "fitted_steps": [fitted_to_dict(s) for s in self.fitted_steps],
            "feature_names": list(self.feature_names),
            "task_type": self.task_type.value,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FittedPipeline":
        return cls(
            pipeline=Pipeline.from_dict(d["pipeline"]),
            fitted_steps=[fitted_from_dict(s) for s in d["fitted_steps"]],
            feature_names=tuple(d["feature_names"]),
            task_type=TaskType(d["task_type"]),
        )


def fit_pipeline(pipeline: Pipeline, dataset: Dataset, spec: ValidatedSpec,
                 row_subset: Sequence[int] | None = None) -> FittedPipeline:
    """Fit each step on the output of the previous one.

    Only ``spec.features`` are visible to the chain; the estimator also sees
    the target restricted to the same rows. ``row_subset`` defaults to every
    row with a present target.
    """
    est_descriptor = descriptor(pipeline.estimator.name)
    if spec.task_type not in est_descriptor.tasks:
        raise WrongTaskType(
            f"{pipeline.estimator.name} does not support {spec.task_type.value}")
    rows = tuple(row_subset) if row_subset is not None else spec.usable_rows
    table = table_from_dataset(dataset, spec.features, rows)
    y = target_values(dataset, spec, rows)

    fitted_steps = []
    for i, s in enumerate(pipeline.preprocessors):
        primitive = s.make()
        try:
            primitive.fit(table, y)
            table = primitive.transform(table)
        except Exception as exc:
            raise _annotate(exc, i, s.name)
        fitted_steps.append(primitive)
    estimator = pipeline.estimator.make()
    try:
        estimator.fit(table, y)
    except Exception as exc:
        raise _annotate(exc, len(pipeline.steps) - 1, pipeline.estimator.name)
    fitted_steps.append(estimator)
    return FittedPipeline(pipeline=pipeline, fitted_steps=fitted_steps,
                          feature_names=spec.features, task_type=spec.task_type)


# -- structural diff ------------------------------------------------------------


@dataclass(frozen=True)
class DiffEntry:
    label: str  # same | changed-hyperparams | only-in-p1 | only-in-p2
    name: str
    p1_hyperparams: dict[str, Any] | None = None
    p2_hyperparams: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "name": self.name,
                "p1_hyperparams": self.p1_hyperparams,
                "p2_hyperparams": self.p2_hyperparams}


def diff(p1: Pipeline, p2: Pipeline) -> list[DiffEntry]:
    """Align steps by longest common subsequence over primitive names."""
    a = [s.name for s in p1.steps]
    b = [s.name for s in p2.steps]
    n, m = len(a), len(b)
    lcs = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                lcs[i][j] = lcs[i + 1][j + 1] + 1
            else:
                lcs[i][j] = max(lcs[i + 1][j], lcs[i][j + 1])
    entries: list[DiffEntry] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            hp1 = p1.steps[i].hyperparam_dict()
            hp2 = p2.steps[j].hyperparam_dict()
            label = "same" if hp1 == hp2 else "changed-hyperparams"
            entries.append(DiffEntry(label, a[i], hp1, hp2))
            i += 1
            j += 1
        elif lcs[i + 1][j] >= lcs[i][j + 1]:
            entries.append(DiffEntry("only-in-p1", a[i],
                                     p1.steps[i].hyperparam_dict(), None))
            i += 1
        else:
            entries.append(DiffEntry("only-in-p2", b[j],
                                     None, p2.steps[j].hyperparam_dict()))
            j += 1
    for k in range(i, n):
        entries.append(DiffEntry("only-in-p1", a[k], p1.steps[k].hyperparam_dict(), None))
    for k in range(j, m):
        entries.append(DiffEntry("only-in-p2", b[k], None, p2.steps[k].hyperparam_dict()))
    return entries
