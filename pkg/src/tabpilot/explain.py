"""Explanation artifacts: confusion matrix, surrogate rules, partial
dependence, and the prediction-vs-truth scatter.

All artifacts are computed from out-of-sample prediction records or from the
final fitted model over the rows evaluation used, never from training-set
scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .data_model import Dataset, DType
from .errors import FeatureNotFound, TooFewRows, WrongTaskType
from .evaluation import ScoreReport
from .pipeline import FittedPipeline
from .primitives.base import FeatureTable
from .primitives import table_from_dataset
from .problem_spec import TaskType, ValidatedSpec

PDP_GRID_POINTS = 20
FIDELITY_THRESHOLD = 0.8
SURROGATE_DEPTHS = range(2, 7)
MIN_GAIN = 1e-12


# -- confusion matrix ---------------------------------------------------------------


def confusion_matrix(report: ScoreReport, task_type: TaskType) -> dict[str, Any]:
    """counts[i][j] = samples with true class i predicted as class j."""
    if task_type != TaskType.CLASSIFICATION:
        raise WrongTaskType("confusion matrix needs a classification report")
    labels = sorted({str(v) for v in report.y_true} | {str(v) for v in report.y_pred})
    index = {c: i for i, c in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for t, p in zip(report.y_true, report.y_pred):
        counts[index[str(t)]][index[str(p)]] += 1
    return {"labels": labels, "counts": counts}


# -- confusion scatter ----------------------------------------------------------------


def confusion_scatter(report: ScoreReport, task_type: TaskType) -> dict[str, Any]:
    """(y_true, y_pred) pairs plus the constant-prediction degeneracy flag."""
    if task_type != TaskType.REGRESSION:
        raise WrongTaskType("prediction scatter needs a regression report")
    t = np.array(report.y_true, dtype=float)
    p = np.array(report.y_pred, dtype=float)
    # exact spread test: np.var on identical floats can round to ~1e-33
    degenerate = bool(len(p) > 0 and np.all(p == p[0]) and not np.all(t == t[0]))
    return {"pairs": [[float(a), float(b)] for a, b in zip(t, p)],
            "degenerate": degenerate}


# -- surrogate rules ----------------------------------------------------------------


@dataclass(frozen=True)
class Predicate:
    feature: str
    op: str  # "<=" | ">" | "="
    value: Any

    def to_dict(self) -> dict[str, Any]:
        return {"feature": self.feature, "op": self.op, "value": self.value}


@dataclass(frozen=True)
class Rule:
    predicates: tuple[Predicate, ...]
    predicted_class: str
    support: int
    confidence: float
    distribution: dict[str, float]

    def to_dict(self) -> dict[str, Any]:
        return {"predicates": [p.to_dict() for p in self.predicates],
                "predicted_class": self.predicted_class,
                "support": self.support,
                "confidence": self.confidence,
                "distribution": dict(self.distribution)}


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    fidelity: float
    depth_limit: int
    low_fidelity: bool = False
    degenerate: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"rules": [r.to_dict() for r in self.rules],
                "fidelity": self.fidelity,
                "depth_limit": self.depth_limit,
                "low_fidelity": self.low_fidelity,
                "degenerate": self.degenerate}


def _surrogate_columns(dataset: Dataset, spec: ValidatedSpec,
                       rows: Sequence[int]) -> list[tuple[str, str, list]]:
    """(name, kind, values) per surrogate input, missing cells filled.

    Temporal features become four numeric parts so rules can reference
    calendar units with plain threshold predicates.
    """
    out: list[tuple[str, str, list]] = []
    for name in spec.features:
        col = dataset.column(name)
        values = [col.values[i] for i in rows]
        if col.dtype == DType.NUMERIC:
            present = [v for v in values if v is not None]
            fill = float(np.mean(present)) if present else 0.0
            out.append((name, "numeric",
                        [fill if v is None else float(v) for v in values]))
        elif col.dtype == DType.TEMPORAL:
            present = [v for v in values if v is not None]
            anchor = present[0] if present else None
            filled = [anchor if v is None else v for v in values]
            for part, get in (("year", lambda d: d.year), ("month", lambda d: d.month),
                              ("day", lambda d: d.day), ("weekday", lambda d: d.weekday())):
                out.append((f"{name}_{part}", "numeric",
                            [0.0 if v is None else float(get(v)) for v in filled]))
        else:
            present = [str(v) for v in values if v is not None]
            counts: dict[str, int] = {}
            for v in present:
                counts[v] = counts.get(v, 0) + 1
            fill = min(counts, key=lambda c: (-counts[c], c)) if counts else ""
            out.append((name, "categorical",
                        [fill if v is None else str(v) for v in values]))
    return out


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    return 1.0 - float(((counts / n) ** 2).sum())


def _numeric_split_gain(values: np.ndarray, codes: np.ndarray, n_classes: int):
    """Best (gain, threshold) for a binary numeric split, or None."""
    n = len(codes)
    order = np.argsort(values, kind="stable")
    xs = values[order]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), codes[order]] = 1.0
    total = onehot.sum(axis=0)
    parent = _gini(total)
    counts = np.cumsum(onehot, axis=0)[:-1]
    sizes = np.arange(1, n, dtype=float)
    valid = xs[:-1] < xs[1:]
    if not valid.any():
        return None
    right = total - counts
    gini_left = 1.0 - ((counts / sizes[:, None]) ** 2).sum(axis=1)
    gini_right = 1.0 - ((right / (n - sizes)[:, None]) ** 2).sum(axis=1)
    weighted = (sizes / n) * gini_left + ((n - sizes) / n) * gini_right
    gains = np.where(valid, parent - weighted, -np.inf)
    i = int(np.argmax(gains))
    if gains[i] <= MIN_GAIN:
        return None
    return float(gains[i]), float((xs[i] + xs[i + 1]) / 2.0)


def _categorical_split_gain(values: list[str], codes: np.ndarray, n_classes: int):
    """Gain of the multiway split over this node's observed categories."""
    cats = sorted(set(values))
    if len(cats) < 2:
        return None
    n = len(codes)
    total = np.bincount(codes, minlength=n_classes).astype(float)
    parent = _gini(total)
    weighted = 0.0
    for cat in cats:
        member = np.array([v == cat for v in values])
        sub = np.bincount(codes[member], minlength=n_classes).astype(float)
        weighted += (member.sum() / n) * _gini(sub)
    gain = parent - weighted
    if gain <= MIN_GAIN:
        return None
    return gain, cats


def _build_surrogate(columns: list[tuple[str, str, list]], codes: np.ndarray,
                     classes: tuple[str, ...], idx: np.ndarray, depth: int,
                     limit: int, path: tuple[Predicate, ...]) -> list[tuple]:
    """Return leaves as (path, member row positions). Greedy Gini splits;
    ties go to the earlier feature, then the lower threshold."""
    node_codes = codes[idx]
    if depth >= limit or len(idx) < 2 or len(set(node_codes.tolist())) == 1:
        return [(path, idx)]
    best = None  # (gain, feature position, kind, payload)
    for pos, (name, kind, values) in enumerate(columns):
        node_values = [values[i] for i in idx]
        if kind == "numeric":
            found = _numeric_split_gain(np.array(node_values, dtype=float),
                                        node_codes, len(classes))
            if found and (best is None or found[0] > best[0]):
                best = (found[0], pos, "numeric", found[1])
        else:
            found = _categorical_split_gain(node_values, node_codes, len(classes))
            if found and (best is None or found[0] > best[0]):
                best = (found[0], pos, "categorical", found[1])
    if best is None:
        return [(path, idx)]
    _, pos, kind, payload = best
    name, _, values = columns[pos]
    leaves: list[tuple] = []
    if kind == "numeric":
        threshold = payload
        arr = np.array([values[i] for i in idx], dtype=float)
        left = idx[arr <= threshold]
        right = idx[arr > threshold]
        leaves += _build_surrogate(columns, codes, classes, left, depth + 1, limit,
                                   path + (Predicate(name, "<=", threshold),))
        leaves += _build_surrogate(columns, codes, classes, right, depth + 1, limit,
                                   path + (Predicate(name, ">", threshold),))
    else:
        for cat in payload:
            member = idx[np.array([values[i] == cat for i in idx])]
            leaves += _build_surrogate(columns, codes, classes, member, depth + 1,
                                       limit, path + (Predicate(name, "=", cat),))
    return leaves


def _ruleset_at_depth(columns, codes, classes, limit: int) -> RuleSet:
    n = len(codes)
    leaves = _build_surrogate(columns, codes, classes, np.arange(n), 0, limit, ())
    rules = []
    agree = 0
    for path, idx in leaves:
        sub = codes[idx]
        counts = np.bincount(sub, minlength=len(classes))
        winner = int(np.argmax(counts))  # ties: first index = smallest label
        matching = int(counts.sum())
        hit = int(counts[winner])
        agree += hit
        rules.append(Rule(
            predicates=path,
            predicted_class=classes[winner],
            support=matching,
            confidence=hit / matching if matching else 0.0,
            distribution={classes[c]: int(counts[c]) / matching
                          for c in range(len(classes)) if counts[c]},
        ))
    return RuleSet(rules=tuple(rules), fidelity=agree / n, depth_limit=limit)


def extract_rules(fitted: FittedPipeline, dataset: Dataset, spec: ValidatedSpec,
                  max_rules: int = 8) -> RuleSet:
    """Fit a small decision tree to the model's own predictions and read its
    leaves as rules.

    Tries depth limits 2..6 and keeps the shallowest tree with at most
    ``max_rules`` leaves and fidelity >= 0.8; otherwise returns the depth-6
    tree flagged low-fidelity. A model that predicts one class everywhere
    yields a single universal rule with fidelity 1.0.
    """
    if spec.task_type != TaskType.CLASSIFICATION:
        raise WrongTaskType("rule extraction needs a classification pipeline")
    if max_rules < 2:
        raise ValueError("max_rules must be at least 2")
    rows = spec.usable_rows
    preds = [str(v) for v in fitted.predict_dataset(dataset, rows)]
    classes = tuple(sorted(set(preds)))
    if len(classes) == 1:
        rule = Rule(predicates=(), predicted_class=classes[0], support=len(rows),
                    confidence=1.0, distribution={classes[0]: 1.0})
        return RuleSet(rules=(rule,), fidelity=1.0, depth_limit=0, degenerate=True)
    index = {c: i for i, c in enumerate(classes)}
    codes = np.array([index[p] for p in preds], dtype=int)
    columns = _surrogate_columns(dataset, spec, rows)
    last = None
    for limit in SURROGATE_DEPTHS:
        rs = _ruleset_at_depth(columns, codes, classes, limit)
        if len(rs.rules) <= max_rules and rs.fidelity >= FIDELITY_THRESHOLD:
            return rs
        last = rs
    return RuleSet(rules=last.rules, fidelity=last.fidelity,
                   depth_limit=last.depth_limit, low_fidelity=True)


# -- partial dependence ----------------------------------------------------------------


def _stage_tables(fitted: FittedPipeline, dataset: Dataset,
                  spec: ValidatedSpec) -> list[FeatureTable]:
    """Feature table before each fitted step: stage 0 is the raw input."""
    tables = [table_from_dataset(dataset, spec.features, spec.usable_rows)]
    for i in range(len(fitted.fitted_steps) - 1):
        tables.append(fitted.fitted_steps[i].transform(tables[-1]))
    return tables


def partial_dependence(fitted: FittedPipeline, dataset: Dataset, spec: ValidatedSpec,
                       feature: str) -> dict[str, Any]:
    """Mean prediction as one feature is clamped across a quantile grid.

    ``feature`` is a raw numeric feature or an expanded temporal part
    (``<name>_year`` etc.); the clamp happens at the first pipeline stage
    whose schema contains it, so scaling downstream stays consistent. The
    ``bin_counts`` strip counts observed values between consecutive grid
    points (last bin inclusive).
    """
    if spec.task_type != TaskType.REGRESSION:
        raise WrongTaskType("partial dependence needs a regression pipeline")
    tables = _stage_tables(fitted, dataset, spec)
    stage = None
    for s, table in enumerate(tables):
        if feature in table.names and table.dtype_of(feature) == DType.NUMERIC:
            stage = s
            break
    if stage is None:
        raise FeatureNotFound(
            feature,
            f"{feature!r} is not a numeric input of this pipeline "
            f"(expanded temporal parts use the <name>_year/_month/_day/_weekday form)")
    table = tables[stage]
    observed = [v for v in table.column(feature) if v is not None]
    if not observed:
        raise TooFewRows(f"{feature!r} has no observed values to build a grid from")
    warnings: list[str] = []

    values = np.array(sorted(observed), dtype=float)
    quantiles = np.quantile(values, np.linspace(0.0, 1.0, PDP_GRID_POINTS))
    grid = sorted(set(float(q) for q in quantiles))
    if len(grid) == 1:
        warnings.append(f"constant feature: {feature!r} has a single observed value")

    col_pos = table.names.index(feature)
    pd_values = []
    for v in grid:
        clamped_cols = list(table.columns)
        clamped_cols[col_pos] = tuple([v] * table.row_count)
        clamped = FeatureTable(table.names, table.dtypes, tuple(clamped_cols))
        preds = fitted.predict_suffix(clamped, start=stage)
        pd_values.append(float(np.mean(np.asarray(preds, dtype=float))))

    if len(grid) == 1:
        bin_counts = [len(observed)]
    else:
        bin_counts = [0] * (len(grid) - 1)
        for v in observed:
            for b in range(len(grid) - 1):
                if grid[b] <= v < grid[b + 1] or (b == len(grid) - 2 and v == grid[-1]):
                    bin_counts[b] += 1
                    break
    return {"feature": feature, "grid": grid, "values": pd_values,
            "bin_counts": bin_counts, "warnings": warnings}


def pdp_features(fitted: FittedPipeline, dataset: Dataset,
                 spec: ValidatedSpec) -> list[str]:
    """Names partial_dependence accepts, in input-schema order.

    Temporal parts are offered only when the pipeline expands them.
    """
    candidates = []
    for name in spec.features:
        dtype = spec.feature_dtypes[name]
        if dtype == DType.NUMERIC:
            candidates.append(name)
        elif dtype == DType.TEMPORAL:
            candidates.extend(f"{name}_{part}"
                              for part in ("year", "month", "day", "weekday"))
    tables = _stage_tables(fitted, dataset, spec)
    available = set()
    for table in tables:
        for name, dtype in zip(table.names, table.dtypes):
            if dtype == DType.NUMERIC:
                available.add(name)
    return [name for name in candidates if name in available]
