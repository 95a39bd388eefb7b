"""Metric computation and evaluation protocols (k-fold CV and holdout).

Scores always come from out-of-sample predictions: k-fold evaluation pools
the out-of-fold predictions and computes each metric once on the pool, so
every evaluated row carries exactly one prediction made by a model that
never trained on it. That per-row record is what the downstream confusion
and scatter views consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .data_model import Dataset
from .errors import TooFewRows, UndefinedMetric
from .pipeline import Pipeline, fit_pipeline, target_values
from .problem_spec import Metric, TaskType, ValidatedSpec


@dataclass(frozen=True)
class ScoreReport:
    metrics: dict[str, float | None]
    rows: tuple[int, ...]             # dataset row index per prediction
    y_true: tuple
    y_pred: tuple
    fold_of: tuple[int, ...]          # validation fold per prediction
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "metrics": dict(self.metrics),
            "predictions": [
                {"row": r, "y_true": t, "y_pred": p, "fold": f}
                for r, t, p, f in zip(self.rows, self.y_true, self.y_pred, self.fold_of)
            ],
            "warnings": list(self.warnings),
        }


# -- metrics ---------------------------------------------------------------------


def _per_class_counts(y_true: Sequence, y_pred: Sequence):
    classes = sorted({str(v) for v in y_true} | {str(v) for v in y_pred})
    tp = {c: 0 for c in classes}
    fp = {c: 0 for c in classes}
    fn = {c: 0 for c in classes}
    for t, p in zip(y_true, y_pred):
        t, p = str(t), str(p)
        if t == p:
            tp[t] += 1
        else:
            fp[p] += 1
            fn[t] += 1
    return classes, tp, fp, fn


def _macro(y_true, y_pred, kind: str, warnings: list[str] | None = None) -> float:
    classes, tp, fp, fn = _per_class_counts(y_true, y_pred)
    values = []
    for c in classes:
        prec_den = tp[c] + fp[c]
        rec_den = tp[c] + fn[c]
        precision = tp[c] / prec_den if prec_den else 0.0
        recall = tp[c] / rec_den if rec_den else 0.0
        if prec_den == 0 and warnings is not None:
            warnings.append(f"class {c!r} never predicted; its precision counted as 0")
        if kind == "precision":
            values.append(precision)
        elif kind == "recall":
            values.append(recall)
        else:
            values.append(2 * precision * recall / (precision + recall)
                          if precision + recall else 0.0)
    return sum(values) / len(values)


def compute_metric(metric: Metric, y_true, y_pred,
                   warnings: list[str] | None = None) -> float:
    """One metric value; raises UndefinedMetric for r2 on constant y_true."""
    n = len(y_true)
    if n == 0 or n != len(y_pred):
        raise UndefinedMetric(
            f"{metric.value} needs equal nonzero lengths, got {n} and {len(y_pred)}")
    if metric == Metric.ACCURACY:
        return sum(str(t) == str(p) for t, p in zip(y_true, y_pred)) / n
    if metric in (Metric.PRECISION, Metric.RECALL, Metric.F1):
        return _macro(y_true, y_pred, metric.value, warnings)

    t = np.asarray(y_true, dtype=float)
    p = np.asarray(y_pred, dtype=float)
    if metric == Metric.MAE:
        return float(np.mean(np.abs(t - p)))
    if metric == Metric.MSE:
        return float(np.mean((t - p) ** 2))
    if metric == Metric.RMSE:
        return float(math.sqrt(np.mean((t - p) ** 2)))
    # r2
    sst = float(((t - t.mean()) ** 2).sum())
    if sst == 0.0:
        raise UndefinedMetric("r2 undefined: constant y_true (SST = 0)")
    sse = float(((t - p) ** 2).sum())
    return 1.0 - sse / sst


# -- fold construction --------------------------------------------------------------


def kfold_assignment(n: int, k: int, seed: int) -> list[int]:
    """Fold index per position: seeded shuffle, then k contiguous chunks.

    Chunk sizes differ by at most one (the first n mod k folds get the
    extra row).
    """
    if k > n:
        raise TooFewRows(f"k={k} exceeds usable row count {n}")
    order = np.random.default_rng(seed).permutation(n)
    fold_of = [0] * n
    base, extra = divmod(n, k)
    start = 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        for pos in order[start:start + size]:
            fold_of[pos] = f
        start += size
    return fold_of


def stratified_assignment(labels: Sequence[str], k: int, seed: int) -> list[int]:
    """Deal each class's shuffled members cyclically across folds.

    The dealing counter continues across classes so global fold sizes still
    differ by at most one.
    """
    n = len(labels)
    if k > n:
        raise TooFewRows(f"k={k} exceeds usable row count {n}")
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(str(lab), []).append(i)
    fold_of = [0] * n
    counter = 0
    for cls in sorted(by_class):
        members = np.array(by_class[cls])
        rng.shuffle(members)
        for i in members:
            fold_of[i] = counter % k
            counter += 1
    return fold_of


def holdout_split(n: int, test_fraction: float, seed: int) -> tuple[list[int], list[int]]:
    """(train positions, test positions); test = last ceil(f*n) of the shuffle."""
    test_size = math.ceil(test_fraction * n)
    if test_size >= n or test_size == 0:
        raise TooFewRows(
            f"holdout fraction {test_fraction} leaves no "
            f"{'training' if test_size >= n else 'test'} rows for n={n}")
    order = list(np.random.default_rng(seed).permutation(n))
    return order[:n - test_size], order[n - test_size:]


def _merge_single_class_folds(fold_of: list[int], labels: Sequence[str], k: int,
                              warnings: list[str]) -> tuple[list[int], int]:
    """Merge any fold whose training complement is single-class into its neighbor.

    Only reachable in extreme label skew; keeps macro metrics computable.
    """
    while k > 2:
        bad = None
        for f in range(k):
            train_labels = {str(l) for l, a in zip(labels, fold_of) if a != f}
            if len(train_labels) < 2:
                bad = f
                break
        if bad is None:
            return fold_of, k
        target = bad - 1 if bad == k - 1 else bad + 1
        warnings.append(f"fold {bad} merged into fold {target}: "
                        f"its training split had a single class")
        fold_of = [target if a == bad else a for a in fold_of]
        remap = {old: new for new, old in enumerate(sorted(set(fold_of)))}
        fold_of = [remap[a] for a in fold_of]
        k -= 1
    return fold_of, k


def evaluate(pipeline: Pipeline, dataset: Dataset, spec: ValidatedSpec,
             seed: int = 0) -> ScoreReport:
    """Score a pipeline under the spec's evaluation method.

    k-fold: refit k times, predict each fold with the model that excluded
    it, compute metrics once on the pooled predictions. holdout: single
    fit on the retained rows, scored on the held-out rows (fold index 0).
    """
    rows = spec.usable_rows
    n = len(rows)
    y_all = target_values(dataset, spec, rows)
    warnings: list[str] = []
    method = spec.spec.eval_method

    if method.kind == "holdout":
        train_pos, test_pos = holdout_split(n, method.test_fraction, seed)
        fitted = fit_pipeline(pipeline, dataset, spec,
                              row_subset=[rows[i] for i in train_pos])
        preds = fitted.predict_dataset(dataset, [rows[i] for i in test_pos])
        eval_pos = test_pos
        fold_of_pred = [0] * len(test_pos)
    else:
        k = method.k
        if spec.task_type == TaskType.CLASSIFICATION:
            counts: dict[str, int] = {}
            for lab in y_all:
                counts[str(lab)] = counts.get(str(lab), 0) + 1
            if min(counts.values()) >= k:
                fold_of = stratified_assignment([str(v) for v in y_all], k, seed)
            else:
                fold_of = kfold_assignment(n, k, seed)
                warnings.append(
                    "folds not stratified: some class has fewer members than k")
            fold_of, k = _merge_single_class_folds(
                fold_of, [str(v) for v in y_all], k, warnings)
        else:
            fold_of = kfold_assignment(n, k, seed)

        pred_by_pos: dict[int, Any] = {}
        for f in range(k):
            train_rows = [rows[i] for i in range(n) if fold_of[i] != f]
            val_pos = [i for i in range(n) if fold_of[i] == f]
            fitted = fit_pipeline(pipeline, dataset, spec, row_subset=train_rows)
            fold_preds = fitted.predict_dataset(dataset, [rows[i] for i in val_pos])
            for i, p in zip(val_pos, fold_preds):
                pred_by_pos[i] = p
        eval_pos = list(range(n))
        preds = [pred_by_pos[i] for i in eval_pos]
        fold_of_pred = [fold_of[i] for i in eval_pos]

    y_true = [y_all[i] for i in eval_pos]
    metric_values: dict[str, float | None] = {}
    for metric in spec.spec.report_metrics:
        try:
            metric_values[metric.value] = compute_metric(metric, y_true, preds, warnings)
        except UndefinedMetric as exc:
            metric_values[metric.value] = None
            warnings.append(f"{metric.value} undefined: {exc.message}")

    def plain(v):
        return float(v) if isinstance(v, (int, float, np.floating)) else str(v)

    return ScoreReport(
        metrics=metric_values,
        rows=tuple(rows[i] for i in eval_pos),
        y_true=tuple(plain(v) for v in y_true),
        y_pred=tuple(plain(v) for v in preds),
        fold_of=tuple(fold_of_pred),
        warnings=tuple(dict.fromkeys(warnings)),  # dedup, keep order
    )
