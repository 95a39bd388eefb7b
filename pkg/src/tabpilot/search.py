"""Budgeted pipeline search with an incremental, replayable event stream.

Strategy: the task's baseline runs first, then one default-hyperparameter
candidate per template (a template is the canonical preprocessor chain for
the dataset's dtypes plus one estimator). If the whole finite grid fits the
budget it is enumerated exhaustively; otherwise remaining budget goes to
seeded random sampling, round-robin over the better-scoring half of the
templates, re-ranked each cycle.

Evaluation runs on one worker thread so the event order is a pure function
of (dataset, spec, seed): identical runs produce identical streams.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .data_model import Dataset, DType
from .errors import NoScoredSolutions, UnknownMetric
from .evaluation import ScoreReport, evaluate
from .pipeline import FittedPipeline, Pipeline, PrimitiveSpec, fit_pipeline, step
from .primitives.registry import descriptor, estimators_for
from .problem_spec import HIGHER_IS_BETTER, Metric, TaskType, ValidatedSpec, validate

TIME_GRACE_FACTOR = 1.10


@dataclass(frozen=True)
class Solution:
    solution_id: str
    created_at: int  # event sequence number, not wall clock
    status: str      # scored | failed
    pipeline: Pipeline
    report: ScoreReport | None = None
    reason: str | None = None
    template_index: int | None = None

    def metric_value(self, metric: Metric) -> float | None:
        if self.report is None:
            return None
        return self.report.metrics.get(metric.value)

    def to_dict(self) -> dict[str, Any]:
        return {
            "solution_id": self.solution_id,
            "created_at": self.created_at,
            "status": self.status,
            "pipeline": self.pipeline.to_dict(),
            "report": self.report.to_dict() if self.report else None,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str  # solution | finished
    solution: Solution | None = None
    reason: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "kind": self.kind,
                "solution": self.solution.to_dict() if self.solution else None,
                "reason": self.reason}


@dataclass
class Template:
    index: int
    preprocessors: tuple[PrimitiveSpec, ...]
    estimator_name: str
    grid: list[dict[str, Any]]
    tried: set[int] = field(default_factory=set)

    def untried(self) -> list[int]:
        return [i for i in range(len(self.grid)) if i not in self.tried]

    def pipeline_at(self, grid_index: int) -> Pipeline:
        est = PrimitiveSpec(self.estimator_name,
                            tuple(self.grid[grid_index].items()))
        return Pipeline(steps=self.preprocessors + (est,))


def canonical_preprocessors(dataset: Dataset, spec: ValidatedSpec) -> tuple[PrimitiveSpec, ...]:
    """Fixed preprocessor chain implied by the feature dtypes.

    Impute when anything is missing, encode categoricals, expand temporals,
    always scale: every estimator then sees a fully numeric table.
    """
    chain: list[PrimitiveSpec] = []
    if any(dataset.column(f).missing_count() > 0 for f in spec.features):
        chain.append(step("mean_imputer"))
    dtypes = set(spec.feature_dtypes.values())
    if DType.CATEGORICAL in dtypes:
        chain.append(step("one_hot_encoder"))
    if DType.TEMPORAL in dtypes:
        chain.append(step("datetime_expander"))
    chain.append(step("standard_scaler"))
    return tuple(chain)


def build_templates(dataset: Dataset, spec: ValidatedSpec) -> list[Template]:
    chain = canonical_preprocessors(dataset, spec)
    templates = []
    for i, d in enumerate(estimators_for(spec.task_type, include_baselines=False)):
        templates.append(Template(index=i, preprocessors=chain,
                                  estimator_name=d.name, grid=d.search_grid()))
    return templates


def baseline_pipeline(task: TaskType) -> Pipeline:
    (d,) = [d for d in estimators_for(task) if d.is_baseline]
    return Pipeline(steps=(step(d.name),))


class SearchRun:
    """One budgeted search over a dataset/spec pair.

    ``start()`` runs the candidate loop on a daemon thread;
    ``run_to_completion()`` runs it inline. Events accumulate in emission
    order and are served by cursor, so a consumer that replays from cursor 0
    reconstructs the exact solution set.
    """

    def __init__(self, dataset: Dataset, spec: ValidatedSpec, seed: int,
                 run_id: str = "run"):
        self.dataset = dataset
        self.spec = validate(spec, dataset)  # cheap re-check, idempotent
        self.seed = seed
        self.run_id = run_id
        self.budget = self.spec.spec.budget
        self._events: list[Event] = []
        self._solutions: list[Solution] = []
        self._fitted: dict[str, FittedPipeline] = {}
        self._lock = threading.Lock()
        self._cancel_requested = threading.Event()
        self._thread: threading.Thread | None = None
        self._state = "running"
        self._finish_reason: str | None = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> "SearchRun":
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        return self

    def run_to_completion(self) -> "SearchRun":
        self._run()
        return self

    def wait(self, timeout: float | None = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout)

    def cancel(self) -> None:
        self._cancel_requested.set()

    # -- observable state ----------------------------------------------------

    @property
    def state(self) -> str:
        with self._lock:
            return self._state

    @property
    def finish_reason(self) -> str | None:
        with self._lock:
            return self._finish_reason

    @property
    def solutions(self) -> list[Solution]:
        with self._lock:
            return list(self._solutions)

    def scored_solutions(self) -> list[Solution]:
        return [s for s in self.solutions if s.status == "scored"]

    def solution(self, solution_id: str) -> Solution | None:
        with self._lock:
            for s in self._solutions:
                if s.solution_id == solution_id:
                    return s
        return None

    def fitted_model(self, solution_id: str) -> FittedPipeline | None:
        with self._lock:
            return self._fitted.get(solution_id)

    def events(self, cursor: int = 0) -> tuple[list[Event], int]:
        """Events at positions >= cursor, plus the next cursor value."""
        with self._lock:
            cursor = max(0, min(cursor, len(self._events)))
            return list(self._events[cursor:]), len(self._events)

    # -- the candidate loop ----------------------------------------------------

    def _emit_solution(self, pipeline: Pipeline, report: ScoreReport | None,
                       reason: str | None, template_index: int | None,
                       fitted: FittedPipeline | None) -> None:
        with self._lock:
            seq = len(self._events)
            solution = Solution(
                solution_id=f"{self.run_id}-{seq}",
                created_at=seq,
                status="scored" if report is not None else "failed",
                pipeline=pipeline,
                report=report,
                reason=reason,
                template_index=template_index,
            )
            self._solutions.append(solution)
            if fitted is not None:
                self._fitted[solution.solution_id] = fitted
            self._events.append(Event(seq=seq, kind="solution", solution=solution))

    def _finish(self, reason: str) -> None:
        with self._lock:
            self._state = f"finished({reason})"
            self._finish_reason = reason
            self._events.append(Event(seq=len(self._events), kind="finished",
                                      reason=reason))

    def _evaluate_candidate(self, pipeline: Pipeline,
                            template_index: int | None) -> None:
        try:
            report = evaluate(pipeline, self.dataset, self.spec, seed=self.seed)
            # final model on every usable row, backing explanations
            fitted = fit_pipeline(pipeline, self.dataset, self.spec)
        except Exception as exc:  # any candidate failure becomes a failed Solution
            self._emit_solution(pipeline, None, f"{type(exc).__name__}: {exc}",
                                template_index, None)
        else:
            self._emit_solution(pipeline, report, None, template_index, fitted)

    def _run(self) -> None:
        started = time.monotonic()
        rng = np.random.default_rng(self.seed)
        templates = build_templates(self.dataset, self.spec)
        evaluated = 0
        seen_ids: set[str] = set()

        def out_of_time() -> bool:
            return time.monotonic() - started >= self.budget.time_limit_seconds

        def stop_reason(more_candidates: bool) -> str | None:
            if self._cancel_requested.is_set():
                return "cancelled"
            if evaluated >= self.budget.max_pipelines:
                return "budget_pipelines" if more_candidates else "exhausted"
            if out_of_time():
                return "budget_time"
            return None

        def try_candidate(pipeline: Pipeline, template_index: int | None) -> bool:
            """Evaluate unless a stop condition fired; False means stop."""
            nonlocal evaluated
            reason = stop_reason(more_candidates=True)
            if reason:
                self._finish(reason)
                return False
            if pipeline.id in seen_ids:
                return True  # duplicate: skip without spending budget
            seen_ids.add(pipeline.id)
            evaluated += 1
            self._evaluate_candidate(pipeline, template_index)
            return True

        # phase 0: the task's baseline
        if not try_candidate(baseline_pipeline(self.spec.task_type), None):
            return

        # phase 1: the default-hyperparameter candidate of every template
        for t in templates:
            defaults = descriptor(t.estimator_name).default_hyperparams()
            grid_index = t.grid.index(defaults) if defaults in t.grid else None
            if grid_index is not None:
                t.tried.add(grid_index)
                pipeline = t.pipeline_at(grid_index)
            else:
                est = PrimitiveSpec(t.estimator_name, tuple(defaults.items()))
                pipeline = Pipeline(steps=t.preprocessors + (est,))
            if not try_candidate(pipeline, t.index):
                return

        total_space = 1 + sum(len(t.grid) for t in templates)
        if total_space <= self.budget.max_pipelines:
            # tiny space: enumerate every grid point exactly once
            for t in templates:
                for grid_index in t.untried():
                    t.tried.add(grid_index)
                    if not try_candidate(t.pipeline_at(grid_index), t.index):
                        return
            self._finish(stop_reason(more_candidates=False) or "exhausted")
            return

        # random phase: sample the top-scoring half of templates, re-ranked
        # each cycle; templates with exhausted grids fall out of the pool
        metric = self.spec.spec.primary_metric
        higher = HIGHER_IS_BETTER[metric]

        def best_score(t: Template) -> float | None:
            scores = [s.metric_value(metric) for s in self._solutions
                      if s.template_index == t.index and s.status == "scored"]
            scores = [v for v in scores if v is not None]
            if not scores:
                return None
            return max(scores) if higher else min(scores)

        while True:
            open_templates = [t for t in templates if t.untried()]
            if not open_templates:
                self._finish(stop_reason(more_candidates=False) or "exhausted")
                return
            scored = [(best_score(t), t) for t in open_templates]
            # rank best-first; templates with no score yet go last
            scored.sort(key=lambda pair: (
                pair[0] is None,
                (-pair[0] if higher else pair[0]) if pair[0] is not None else 0.0,
                pair[1].index))
            active = [t for _, t in scored[:math.ceil(len(scored) / 2)]]
            for t in active:
                untried = t.untried()
                if not untried:
                    continue
                grid_index = untried[int(rng.integers(len(untried)))]
                t.tried.add(grid_index)
                if not try_candidate(t.pipeline_at(grid_index), t.index):
                    return


def start_search(dataset: Dataset, spec: ValidatedSpec, seed: int,
                 run_id: str = "run") -> SearchRun:
    return SearchRun(dataset, spec, seed, run_id=run_id).start()


def run_search(dataset: Dataset, spec: ValidatedSpec, seed: int,
               run_id: str = "run") -> SearchRun:
    return SearchRun(dataset, spec, seed, run_id=run_id).run_to_completion()


# -- summaries ---------------------------------------------------------------------


def _metric_for(run: SearchRun, metric: Metric | str) -> Metric:
    metric = Metric(metric)
    if metric not in run.spec.spec.report_metrics:
        raise UnknownMetric(f"metric {metric.value!r} not in this run's report set")
    return metric


def summarize_scores(run: SearchRun, metric: Metric | str) -> dict[str, Any]:
    """Fixed 10-bin histogram of scored-solution metric values.

    ``bin_of`` maps each contributing solution id to its bin index so a
    consumer can highlight the bin a hovered solution falls in.
    """
    metric = _metric_for(run, metric)
    pairs = [(s.solution_id, s.metric_value(metric)) for s in run.scored_solutions()]
    pairs = [(sid, v) for sid, v in pairs if v is not None]
    if not pairs:
        raise NoScoredSolutions(f"no scored solutions with a {metric.value} value")
    values = [v for _, v in pairs]
    lo, hi = min(values), max(values)
    if lo == hi:
        bins = [(lo, hi, len(values))]
        bin_of = {sid: 0 for sid, _ in pairs}
    else:
        width = (hi - lo) / 10
        counts = [0] * 10
        bin_of = {}
        for sid, v in pairs:
            b = min(int((v - lo) / width), 9)
            counts[b] += 1
            bin_of[sid] = b
        bins = [(lo + i * width, lo + (i + 1) * width, counts[i]) for i in range(10)]
    return {"metric": metric.value,
            "bins": [{"lo": b[0], "hi": b[1], "count": b[2]} for b in bins],
            "bin_of": bin_of}


def rank_solutions(run: SearchRun, metric: Metric | str) -> list[str]:
    """Scored solution ids, best first; ties and missing values by seq order."""
    metric = _metric_for(run, metric)
    higher = HIGHER_IS_BETTER[metric]
    ranked = sorted(
        run.scored_solutions(),
        key=lambda s: (
            s.metric_value(metric) is None,
            (-(s.metric_value(metric) or 0.0) if higher
             else (s.metric_value(metric) or 0.0)),
            s.created_at))
    return [s.solution_id for s in ranked]


def parallel_coordinates(run: SearchRun) -> dict[str, Any]:
    """One full metric vector per scored solution, plus observed ranges."""
    scored = run.scored_solutions()
    if not scored:
        raise NoScoredSolutions("run has no scored solutions")
    metrics = [m.value for m in run.spec.spec.report_metrics]
    rows = [{"solution_id": s.solution_id,
             "values": [s.report.metrics.get(m) for m in metrics]}
            for s in scored]
    ranges = {}
    for i, m in enumerate(metrics):
        present = [r["values"][i] for r in rows if r["values"][i] is not None]
        ranges[m] = {"min": min(present), "max": max(present)} if present else None
    return {"metrics": metrics, "solutions": rows, "ranges": ranges}
