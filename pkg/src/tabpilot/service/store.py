"""Per-session persistence: one directory per session holding JSON and CSV
files, written atomically so a reader never observes a half-written file.

Finished runs are snapshotted to disk; reloading a session replays them
through ``ReplayRun``, which serves the same read API as a live run.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from ..data_model import Dataset, load_dataset, sidecar_dict, to_csv_text
from ..errors import NotFound
from ..evaluation import ScoreReport
from ..pipeline import FittedPipeline, Pipeline
from ..problem_spec import ProblemSpec, ValidatedSpec, parse, serialize, validate
from ..search import Event, SearchRun, Solution


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def report_from_dict(d: dict[str, Any]) -> ScoreReport:
    preds = d.get("predictions", [])
    return ScoreReport(metrics=dict(d["metrics"]),
                       rows=tuple(p["row"] for p in preds),
                       y_true=tuple(p["y_true"] for p in preds),
                       y_pred=tuple(p["y_pred"] for p in preds),
                       fold_of=tuple(p["fold"] for p in preds),
                       warnings=tuple(d.get("warnings", [])))


def solution_from_dict(d: dict[str, Any]) -> Solution:
    report = report_from_dict(d["report"]) if d.get("report") else None
    return Solution(solution_id=d["solution_id"], created_at=d["created_at"],
                    status=d["status"], pipeline=Pipeline.from_dict(d["pipeline"]),
                    report=report, reason=d.get("reason"))


class ReplayRun:
    """Read-only stand-in for a finished SearchRun, restored from disk."""

    def __init__(self, run_id: str, seed: int, spec: ValidatedSpec,
                 state: str, finish_reason: str | None,
                 events: list[Event], fitted_payloads: dict[str, dict]):
        self.run_id = run_id
        self.seed = seed
        self.spec = spec
        self._state = state
        self._finish_reason = finish_reason
        self._events = events
        self._solutions = [e.solution for e in events if e.solution is not None]
        self._fitted_payloads = fitted_payloads
        self._fitted_cache: dict[str, FittedPipeline] = {}

    @property
    def state(self) -> str:
        return self._state

    @property
    def finish_reason(self) -> str | None:
        return self._finish_reason

    @property
    def solutions(self) -> list[Solution]:
        return list(self._solutions)

    def scored_solutions(self) -> list[Solution]:
        return [s for s in self._solutions if s.status == "scored"]

    def solution(self, solution_id: str) -> Solution | None:
        for s in self._solutions:
            if s.solution_id == solution_id:
                return s
        return None

    def fitted_model(self, solution_id: str) -> FittedPipeline | None:
        if solution_id not in self._fitted_cache:
            payload = self._fitted_payloads.get(solution_id)
            if payload is None:
                return None
            self._fitted_cache[solution_id] = FittedPipeline.from_dict(payload)
        return self._fitted_cache[solution_id]

    def events(self, cursor: int = 0) -> tuple[list[Event], int]:
        return self._events[cursor:], len(self._events)

    def cancel(self) -> None:  # already finished; cancel stays idempotent
        pass

    def wait(self, timeout: float | None = None) -> None:
        pass


@dataclass
class ProblemRecord:
    problem_id: str
    dataset_name: str
    vspec: ValidatedSpec

    def to_dict(self) -> dict[str, Any]:
        return {"problem_id": self.problem_id,
                "dataset": self.dataset_name,
                "spec": json.loads(serialize(self.vspec.spec)),
                "usable_row_count": len(self.vspec.usable_rows),
                "feature_dtypes": {k: v.value
                                   for k, v in self.vspec.feature_dtypes.items()}}


@dataclass
class Session:
    session_id: str
    path: Path
    created_at: str
    updated_at: str
    datasets: dict[str, Dataset] = field(default_factory=dict)
    problems: dict[str, ProblemRecord] = field(default_factory=dict)
    runs: dict[str, Any] = field(default_factory=dict)  # SearchRun | ReplayRun
    run_meta: dict[str, dict[str, Any]] = field(default_factory=dict)
    counters: dict[str, int] = field(default_factory=lambda: {"problem": 0, "run": 0})
    lock: threading.RLock = field(default_factory=threading.RLock)
    augment_cache: dict[tuple[str, str], Any] = field(default_factory=dict)
    snapshotted: set[str] = field(default_factory=set)

    def dataset(self, name: str) -> Dataset:
        if name not in self.datasets:
            raise NotFound("dataset", name)
        return self.datasets[name]

    def problem(self, problem_id: str) -> ProblemRecord:
        if problem_id not in self.problems:
            raise NotFound("problem", problem_id)
        return self.problems[problem_id]

    def run(self, run_id: str):
        if run_id not in self.runs:
            raise NotFound("run", run_id)
        return self.runs[run_id]

    def unique_dataset_name(self, base: str) -> str:
        if base not in self.datasets:
            return base
        k = 2
        while f"{base}_{k}" in self.datasets:
            k += 1
        return f"{base}_{k}"


class SessionStore:
    """Registry of sessions rooted at one directory.

    Sessions load lazily from disk, so a store pointed at an existing root
    serves everything a previous process persisted.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.RLock()

    # -- lifecycle ----------------------------------------------------------------

    def create(self) -> Session:
        with self._lock:
            session_id = uuid.uuid4().hex[:12]
            path = self.root / session_id
            (path / "datasets").mkdir(parents=True)
            (path / "runs").mkdir()
            now = _now()
            session = Session(session_id=session_id, path=path,
                              created_at=now, updated_at=now)
            self._sessions[session_id] = session
            self._save_registry(session)
            return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
            path = self.root / session_id
            if not (path / "session.json").exists():
                raise NotFound("session", session_id)
            session = self._load(path)
            self._sessions[session_id] = session
            return session

    def session_ids(self) -> list[str]:
        with self._lock:
            on_disk = {p.name for p in self.root.iterdir()
                       if (p / "session.json").exists()}
            return sorted(on_disk | set(self._sessions))

    # -- mutation ----------------------------------------------------------------

    def add_dataset(self, session: Session, dataset: Dataset) -> Dataset:
        """Register under a collision-free name and persist CSV + sidecar."""
        with session.lock:
            name = session.unique_dataset_name(dataset.name)
            if name != dataset.name:
                dataset = Dataset(name=name, columns=dataset.columns,
                                  provenance=dataset.provenance)
            session.datasets[name] = dataset
            folder = session.path / "datasets"
            _atomic_write(folder / f"{name}.csv", to_csv_text(dataset))
            _atomic_write(folder / f"{name}.meta.json",
                          json.dumps(sidecar_dict(dataset), indent=2))
            self._touch(session)
            return dataset

    def add_problem(self, session: Session, dataset_name: str,
                    spec: ProblemSpec) -> ProblemRecord:
        with session.lock:
            vspec = validate(spec, session.dataset(dataset_name))
            session.counters["problem"] += 1
            pid = f"p{session.counters['problem']}"
            record = ProblemRecord(problem_id=pid, dataset_name=dataset_name,
                                   vspec=vspec)
            session.problems[pid] = record
            self._touch(session)
            return record

    def start_run(self, session: Session, problem_id: str, seed: int) -> SearchRun:
        with session.lock:
            record = session.problem(problem_id)
            dataset = session.dataset(record.dataset_name)
            session.counters["run"] += 1
            rid = f"r{session.counters['run']}"
            run = SearchRun(dataset, record.vspec, seed=seed, run_id=rid)
            session.runs[rid] = run
            session.run_meta[rid] = {"problem_id": problem_id, "seed": seed}
            self._touch(session)
            run.start()
            return run

    def snapshot_run(self, session: Session, run_id: str) -> None:
        """Persist a finished run once; no-op for live or already-saved runs."""
        with session.lock:
            run = session.run(run_id)
            if run_id in session.snapshotted or run.state == "running":
                return
            events, _ = run.events(0)
            fitted = {}
            for s in run.scored_solutions():
                model = run.fitted_model(s.solution_id)
                if model is not None:
                    fitted[s.solution_id] = model.to_dict()
            payload = {
                "run_id": run_id,
                "problem_id": session.run_meta[run_id]["problem_id"],
                "seed": session.run_meta[run_id]["seed"],
                "state": run.state,
                "finish_reason": run.finish_reason,
                "events": [e.to_dict() for e in events],
                "fitted": fitted,
            }
            _atomic_write(session.path / "runs" / f"{run_id}.json",
                          json.dumps(payload))
            session.snapshotted.add(run_id)
            self._touch(session)

    # -- persistence ----------------------------------------------------------------

    def _touch(self, session: Session) -> None:
        session.updated_at = _now()
        self._save_registry(session)

    def _save_registry(self, session: Session) -> None:
        payload = {
            "session_id": session.session_id,
            "created_at": session.created_at,
            "updated_at": session.updated_at,
            "counters": session.counters,
            "problems": {pid: {"dataset": r.dataset_name,
                               "spec": json.loads(serialize(r.vspec.spec))}
                         for pid, r in session.problems.items()},
            "run_meta": session.run_meta,
        }
        _atomic_write(session.path / "session.json", json.dumps(payload, indent=2))

    def _load(self, path: Path) -> Session:
        doc = json.loads((path / "session.json").read_text(encoding="utf-8"))
        session = Session(session_id=doc["session_id"], path=path,
                          created_at=doc["created_at"], updated_at=doc["updated_at"],
                          counters=dict(doc.get("counters", {"problem": 0, "run": 0})))
        for csv_path in sorted((path / "datasets").glob("*.csv")):
            ds = load_dataset(csv_path)
            session.datasets[ds.name] = ds
        for pid, rec in doc.get("problems", {}).items():
            spec = parse(rec["spec"])
            vspec = validate(spec, session.dataset(rec["dataset"]))
            session.problems[pid] = ProblemRecord(problem_id=pid,
                                                  dataset_name=rec["dataset"],
                                                  vspec=vspec)
        session.run_meta = {rid: dict(m)
                            for rid, m in doc.get("run_meta", {}).items()}
        for rid, meta in session.run_meta.items():
            run_path = path / "runs" / f"{rid}.json"
            if not run_path.exists():
                continue  # run never finished before shutdown
            snap = json.loads(run_path.read_text(encoding="utf-8"))
            events = []
            for e in snap["events"]:
                sol = solution_from_dict(e["solution"]) if e.get("solution") else None
                events.append(Event(seq=e["seq"], kind=e["kind"], solution=sol,
                                    reason=e.get("reason")))
            record = session.problems[meta["problem_id"]]
            session.runs[rid] = ReplayRun(
                run_id=rid, seed=snap["seed"], spec=record.vspec,
                state=snap["state"], finish_reason=snap.get("finish_reason"),
                events=events, fitted_payloads=snap.get("fitted", {}))
            session.snapshotted.add(rid)
        return session
