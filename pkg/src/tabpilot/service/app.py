"""HTTP+JSON API over sessions: upload, profile, prepare, problems, search
with cursor-polled events, solution exploration, explanations, comparison,
and corpus augmentation.

Every anticipated failure maps to a machine-readable error code derived
from the module error type; unknown ids are 404, stale augmentation
candidates are 409, everything else anticipated is 400.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..augment import (Corpus, apply_augmentation, index_corpus,
                       search_augmentations)
from ..data_model import action_from_dict, ingest_csv, prepare, profile
from ..errors import (NotFound, SchemaError, StaleCandidate, TabpilotError,
                      UnknownMetric)
from ..explain import (confusion_matrix, confusion_scatter, extract_rules,
                       partial_dependence, pdp_features)
from ..pipeline import diff
from ..problem_spec import Metric, parse, serialize
from ..search import parallel_coordinates, rank_solutions, summarize_scores
from .store import ProblemRecord, Session, SessionStore


def _error_code(exc: TabpilotError) -> str:
    code = getattr(exc, "code", None)
    if code:
        return code
    name = type(exc).__name__
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).upper()


def _status_for(exc: TabpilotError) -> int:
    if isinstance(exc, NotFound):
        return 404
    if isinstance(exc, StaleCandidate):
        return 409
    return 400


def _dataset_payload(session: Session, name: str) -> dict[str, Any]:
    ds = session.dataset(name)
    return {"name": ds.name,
            "row_count": ds.row_count,
            "provenance": ds.provenance.to_dict(),
            "columns": [{"name": c.name, "dtype": c.dtype.value,
                         "granularity": c.granularity.value if c.granularity else None}
                        for c in ds.columns],
            "profiles": [p.to_dict() for p in profile(ds)]}


def _metric_param(value: str | None, run) -> Metric:
    if value is None:
        return run.spec.spec.primary_metric
    try:
        return Metric(value)
    except ValueError:
        raise UnknownMetric(f"unknown metric {value!r}") from None


def _run_payload(run) -> dict[str, Any]:
    return {"run_id": run.run_id, "state": run.state,
            "finish_reason": run.finish_reason,
            "solution_count": len(run.solutions)}


def create_app(session_root: str | Path, corpus_dir: str | Path | None = None,
               default_seed: int = 0) -> FastAPI:
    store = SessionStore(session_root)
    app = FastAPI(title="tabpilot", version="0.1.0")

    def load_corpus() -> Corpus:
        if corpus_dir is None:
            return Corpus(directory="", entries=())
        return index_corpus(corpus_dir)

    def settle(session: Session, run_id: str):
        """Snapshot a run the first time it is observed finished."""
        run = session.run(run_id)
        if run.state != "running":
            store.snapshot_run(session, run_id)
        return run

    @app.exception_handler(TabpilotError)
    def on_module_error(request: Request, exc: TabpilotError):
        detail = str(exc) or exc.message
        return JSONResponse(status_code=_status_for(exc),
                            content={"error": _error_code(exc), "detail": detail})

    # -- sessions ----------------------------------------------------------------

    @app.post("/sessions")
    def create_session():
        session = store.create()
        return {"session_id": session.session_id,
                "created_at": session.created_at}

    @app.get("/sessions/{s}")
    def session_info(s: str):
        session = store.get(s)
        with session.lock:
            return {"session_id": session.session_id,
                    "created_at": session.created_at,
                    "updated_at": session.updated_at,
                    "datasets": [{"name": d.name, "row_count": d.row_count,
                                  "provenance": d.provenance.to_dict()}
                                 for d in session.datasets.values()],
                    "problems": [r.to_dict() for r in session.problems.values()],
                    "runs": [_run_payload(r) for r in session.runs.values()]}

    # -- datasets ----------------------------------------------------------------

    @app.post("/sessions/{s}/datasets")
    async def upload_dataset(s: str, request: Request, name: str = "uploaded"):
        session = store.get(s)
        body = await request.body()
        dataset = ingest_csv(body, name=name)
        with session.lock:
            dataset = store.add_dataset(session, dataset)
            return _dataset_payload(session, dataset.name)

    @app.get("/sessions/{s}/datasets")
    def list_datasets(s: str):
        session = store.get(s)
        with session.lock:
            return {"datasets": [{"name": d.name, "row_count": d.row_count,
                                  "provenance": d.provenance.to_dict(),
                                  "columns": [{"name": c.name, "dtype": c.dtype.value}
                                              for c in d.columns]}
                                 for d in session.datasets.values()]}

    @app.get("/sessions/{s}/datasets/{d}/profile")
    def dataset_profile(s: str, d: str):
        session = store.get(s)
        with session.lock:
            return _dataset_payload(session, d)

    @app.post("/sessions/{s}/datasets/{d}/prepare")
    async def prepare_dataset(s: str, d: str, request: Request):
        session = store.get(s)
        payload = await request.json()
        actions = [action_from_dict(a) for a in payload.get("actions", [])]
        if not actions:
            raise SchemaError("$.actions", "at least one preparation action required")
        with session.lock:
            source = session.dataset(d)
            name = payload.get("name") or f"{d}_prepared"
            prepared = prepare(source, actions, name=name)
            prepared = store.add_dataset(session, prepared)
            out = _dataset_payload(session, prepared.name)
            out["applied"] = [a.describe() for a in actions]
            return out

    # -- problems ----------------------------------------------------------------

    @app.post("/sessions/{s}/problems")
    async def create_problem(s: str, request: Request):
        session = store.get(s)
        payload = await request.json()
        if "dataset" not in payload:
            raise SchemaError("$.dataset", "dataset name required")
        spec = parse(payload.get("spec", {k: v for k, v in payload.items()
                                          if k != "dataset"}))
        with session.lock:
            record = store.add_problem(session, payload["dataset"], spec)
            return record.to_dict()

    @app.get("/sessions/{s}/problems")
    def list_problems(s: str):
        session = store.get(s)
        with session.lock:
            return {"problems": [r.to_dict() for r in session.problems.values()]}

    @app.get("/sessions/{s}/problems/{p}")
    def problem_info(s: str, p: str):
        session = store.get(s)
        with session.lock:
            return session.problem(p).to_dict()

    # -- search runs ----------------------------------------------------------------

    @app.post("/sessions/{s}/problems/{p}/search")
    async def start_search(s: str, p: str, request: Request):
        session = store.get(s)
        body = await request.body()
        payload = json.loads(body) if body else {}
        seed = int(payload.get("seed", default_seed))
        run = store.start_run(session, p, seed)
        return {"run_id": run.run_id, "state": run.state, "seed": seed}

    @app.get("/sessions/{s}/runs/{r}/events")
    def run_events(s: str, r: str, cursor: int = 0):
        session = store.get(s)
        run = settle(session, r)
        events, next_cursor = run.events(cursor)
        return {"events": [e.to_dict() for e in events],
                "cursor": next_cursor,
                "state": run.state,
                "finish_reason": run.finish_reason}

    @app.delete("/sessions/{s}/runs/{r}")
    def cancel_run(s: str, r: str):
        session = store.get(s)
        run = session.run(r)
        run.cancel()
        run.wait(timeout=30.0)
        settle(session, r)
        return {"run_id": r, "state": run.state,
                "finish_reason": run.finish_reason}

    @app.get("/sessions/{s}/runs/{r}")
    def run_info(s: str, r: str):
        session = store.get(s)
        return _run_payload(settle(session, r))

    @app.get("/sessions/{s}/runs/{r}/solutions")
    def run_solutions(s: str, r: str, sort: str | None = None):
        session = store.get(s)
        run = settle(session, r)
        metric = _metric_param(sort, run)
        ranking = rank_solutions(run, metric)
        by_id = {sol.solution_id: sol for sol in run.solutions}
        return {"metric": metric.value,
                "ranking": ranking,
                "solutions": [by_id[sid].to_dict() for sid in ranking],
                "failed": [sol.to_dict() for sol in run.solutions
                           if sol.status == "failed"]}

    @app.get("/sessions/{s}/runs/{r}/summary")
    def run_summary(s: str, r: str, metric: str | None = None):
        session = store.get(s)
        run = settle(session, r)
        return summarize_scores(run, _metric_param(metric, run))

    @app.get("/sessions/{s}/runs/{r}/parallel")
    def run_parallel(s: str, r: str):
        session = store.get(s)
        run = settle(session, r)
        return parallel_coordinates(run)

    # -- explanations ----------------------------------------------------------------

    @app.get("/sessions/{s}/runs/{r}/solutions/{sol_id}/explain/{kind}")
    def explain(s: str, r: str, sol_id: str, kind: str,
                feature: str | None = None, max_rules: int = 8):
        session = store.get(s)
        run = settle(session, r)
        solution = run.solution(sol_id)
        if solution is None:
            raise NotFound("solution", sol_id)
        record = _record_for_run(session, r)
        task = record.vspec.task_type
        if kind in ("confusion_matrix", "scatter"):
            if solution.report is None:
                raise NotFound("report", sol_id)
            if kind == "confusion_matrix":
                return confusion_matrix(solution.report, task)
            return confusion_scatter(solution.report, task)
        fitted = run.fitted_model(sol_id)
        if fitted is None:
            raise NotFound("model", sol_id)
        dataset = session.dataset(record.dataset_name)
        if kind == "rules":
            return extract_rules(fitted, dataset, record.vspec,
                                 max_rules=max_rules).to_dict()
        if kind == "pdp":
            if feature is None:
                return {"features": pdp_features(fitted, dataset, record.vspec)}
            return partial_dependence(fitted, dataset, record.vspec, feature)
        raise NotFound("explanation", kind)

    def _record_for_run(session: Session, run_id: str) -> ProblemRecord:
        meta = session.run_meta.get(run_id)
        if meta is None:
            raise NotFound("run", run_id)
        return session.problem(meta["problem_id"])

    # -- comparison ----------------------------------------------------------------

    def _find_solution(session: Session, sol_id: str):
        run_id = sol_id.rsplit("-", 1)[0]
        if run_id not in session.runs:
            raise NotFound("solution", sol_id)
        solution = session.runs[run_id].solution(sol_id)
        if solution is None:
            raise NotFound("solution", sol_id)
        return solution

    @app.get("/sessions/{s}/solutions/compare")
    def compare(s: str, a: str, b: str):
        session = store.get(s)
        with session.lock:
            sol_a = _find_solution(session, a)
            sol_b = _find_solution(session, b)
        entries = diff(sol_a.pipeline, sol_b.pipeline)
        return {"diff": [e.to_dict() for e in entries],
                "a": sol_a.to_dict(), "b": sol_b.to_dict()}

    # -- augmentation ----------------------------------------------------------------

    @app.get("/sessions/{s}/datasets/{d}/augment")
    def augment_search(s: str, d: str, keywords: str = ""):
        session = store.get(s)
        terms = [k for k in re.split(r"[,\s]+", keywords) if k]
        corpus = load_corpus()
        with session.lock:
            dataset = session.dataset(d)
            candidates = search_augmentations(corpus, dataset, terms)
            for cand in candidates:
                session.augment_cache[(d, cand.candidate_id)] = cand
            return {"keywords": terms,
                    "warnings": list(corpus.warnings),
                    "candidates": [c.to_dict() for c in candidates]}

    @app.post("/sessions/{s}/datasets/{d}/augment/apply")
    async def augment_apply(s: str, d: str, request: Request):
        session = store.get(s)
        payload = await request.json()
        cand_id = payload.get("candidate_id")
        if not cand_id:
            raise SchemaError("$.candidate_id", "candidate_id required")
        corpus = load_corpus()
        with session.lock:
            cand = session.augment_cache.get((d, cand_id))
            if cand is None:
                raise NotFound("candidate", cand_id)
            dataset = session.dataset(d)
            result = apply_augmentation(dataset, cand, corpus,
                                        name=payload.get("name"))
            result = store.add_dataset(session, result)
            return _dataset_payload(session, result.name)

    return app
