from __future__ import annotations

import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from tabpilot.demo import make_demo
from tabpilot.service.app import create_app

BUDGET_PROBLEM = {
    "task_type": "regression",
    "target": "collisions",
    "features": ["trips"],
    "primary_metric": "mae",
    "budget": {"max_pipelines": 8, "time_limit_seconds": 60},
    "eval_method": {"kind": "kfold", "k": 4},
}


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    root = tmp_path_factory.mktemp("demo")
    return make_demo(root, seed=0)


@pytest.fixture()
def service(tmp_path, demo):
    app = create_app(session_root=tmp_path / "sessions",
                     corpus_dir=demo["corpus"], default_seed=0)
    with TestClient(app) as client:
        yield client, demo


def new_session(client) -> str:
    r = client.post("/sessions")
    assert r.status_code == 200
    return r.json()["session_id"]


def upload_demo(client, sid, demo, name="collisions") -> str:
    csv_bytes = Path(demo["dataset"]).read_bytes()
    r = client.post(f"/sessions/{sid}/datasets", params={"name": name},
                    content=csv_bytes)
    assert r.status_code == 200, r.text
    return r.json()["name"]


def run_to_finish(client, sid, rid, timeout=30.0) -> dict:
    deadline = time.time() + timeout
    while time.time() < deadline:
        r = client.get(f"/sessions/{sid}/runs/{rid}/events", params={"cursor": 0})
        assert r.status_code == 200
        doc = r.json()
        if doc["state"] != "running":
            return doc
        time.sleep(0.05)
    raise AssertionError("run did not finish in time")


def test_happy_path_end_to_end(service):
    client, demo = service
    sid = new_session(client)
    name = upload_demo(client, sid, demo)

    r = client.get(f"/sessions/{sid}/datasets/{name}/profile")
    assert r.status_code == 200
    prof = r.json()
    assert prof["row_count"] == 365
    assert [c["name"] for c in prof["columns"]] == ["date", "trips", "collisions"]

    r = client.post(f"/sessions/{sid}/problems",
                    json={"dataset": name, **BUDGET_PROBLEM})
    assert r.status_code == 200, r.text
    pid = r.json()["problem_id"]
    assert r.json()["usable_row_count"] == 365

    r = client.post(f"/sessions/{sid}/problems/{pid}/search", json={"seed": 11})
    assert r.status_code == 200
    rid = r.json()["run_id"]
    final = run_to_finish(client, sid, rid)
    assert final["state"].startswith("finished(")

    r = client.get(f"/sessions/{sid}/runs/{rid}/solutions")
    assert r.status_code == 200
    table = r.json()
    assert table["metric"] == "mae"
    assert len(table["ranking"]) >= 1
    assert len(table["solutions"]) == len(table["ranking"])
    steps = table["solutions"][0]["pipeline"]["steps"]
    assert all("name" in s for s in steps)

    r = client.get(f"/sessions/{sid}/runs/{rid}/summary")
    assert r.status_code == 200
    bins = r.json()["bins"]
    assert sum(b["count"] for b in bins) == len(table["ranking"])

    r = client.get(f"/sessions/{sid}/runs/{rid}/parallel")
    assert r.status_code == 200
    assert r.json()["metrics"][0] == "mae"

    best = table["ranking"][0]
    r = client.get(f"/sessions/{sid}/runs/{rid}/solutions/{best}/explain/pdp")
    assert r.status_code == 200
    features = r.json()["features"]
    assert "trips" in features
    r = client.get(f"/sessions/{sid}/runs/{rid}/solutions/{best}/explain/pdp",
                   params={"feature": "trips"})
    assert r.status_code == 200
    assert len(r.json()["grid"]) <= 20
    r = client.get(f"/sessions/{sid}/runs/{rid}/solutions/{best}/explain/scatter")
    assert r.status_code == 200
    assert len(r.json()["pairs"]) == 365

    a, b = table["ranking"][0], table["ranking"][-1]
    r = client.get(f"/sessions/{sid}/solutions/compare", params={"a": a, "b": b})
    assert r.status_code == 200
    assert {e["label"] for e in r.json()["diff"]} <= {
        "same", "changed-hyperparams", "only-in-p1", "only-in-p2"}

    r = client.get(f"/sessions/{sid}/datasets/{name}/augment",
                   params={"keywords": "weather temperature"})
    assert r.status_code == 200
    cands = r.json()["candidates"]
    assert cands and cands[0]["entry"]["name"] == "weather"
    assert cands[0]["operation"] == "join"
    assert len(cands[0]["preview"]["rows"]) == 5

    r = client.post(f"/sessions/{sid}/datasets/{name}/augment/apply",
                    json={"candidate_id": cands[0]["candidate_id"]})
    assert r.status_code == 200, r.text
    joined = r.json()
    col_names = [c["name"] for c in joined["columns"]]
    assert col_names == ["date", "trips", "collisions", "temperature", "humidity"]
    assert joined["row_count"] == 365
    assert joined["provenance"]["kind"] == "augmented"

    wider = dict(BUDGET_PROBLEM, features=["trips", "temperature", "humidity"],
                 budget={"max_pipelines": 8, "time_limit_seconds": 60})
    r = client.post(f"/sessions/{sid}/problems",
                    json={"dataset": joined["name"], **wider})
    assert r.status_code == 200
    pid2 = r.json()["problem_id"]
    r = client.post(f"/sessions/{sid}/problems/{pid2}/search", json={"seed": 11})
    rid2 = r.json()["run_id"]
    run_to_finish(client, sid, rid2)
    r = client.get(f"/sessions/{sid}/runs/{rid2}/solutions")
    best_pre = min(s["report"]["metrics"]["mae"] for s in table["solutions"])
    best_post = min(s["report"]["metrics"]["mae"] for s in r.json()["solutions"])
    assert best_post < best_pre


def test_events_cursor_replay(service):
    client, demo = service
    sid = new_session(client)
    name = upload_demo(client, sid, demo)
    r = client.post(f"/sessions/{sid}/problems", json={"dataset": name, **BUDGET_PROBLEM})
    pid = r.json()["problem_id"]
    rid = client.post(f"/sessions/{sid}/problems/{pid}/search", json={}).json()["run_id"]
    run_to_finish(client, sid, rid)

    # page through with a small cursor versus one big read
    full = client.get(f"/sessions/{sid}/runs/{rid}/events",
                      params={"cursor": 0}).json()["events"]
    paged, cursor = [], 0
    while True:
        doc = client.get(f"/sessions/{sid}/runs/{rid}/events",
                         params={"cursor": cursor}).json()
        paged.extend(doc["events"])
        if doc["cursor"] == cursor and doc["state"] != "running":
            break
        cursor = doc["cursor"]
    assert paged == full
    assert [e["seq"] for e in full] == list(range(len(full)))
    assert full[-1]["kind"] == "finished"
    solution_ids = {e["solution"]["solution_id"] for e in full if e["solution"]}
    table = client.get(f"/sessions/{sid}/runs/{rid}/solutions").json()
    assert set(table["ranking"]) <= solution_ids


def test_unknown_ids_are_404(service):
    client, _ = service
    r = client.get("/sessions/nope")
    assert r.status_code == 404
    assert r.json()["error"] == "SESSION_NOT_FOUND"

    sid = new_session(client)
    r = client.get(f"/sessions/{sid}/datasets/ghost/profile")
    assert r.status_code == 404
    assert r.json()["error"] == "DATASET_NOT_FOUND"
    r = client.get(f"/sessions/{sid}/runs/r9/events")
    assert r.status_code == 404
    assert r.json()["error"] == "RUN_NOT_FOUND"
    r = client.get(f"/sessions/{sid}/solutions/compare", params={"a": "r1-0", "b": "r1-1"})
    assert r.status_code == 404
    assert r.json()["error"] == "SOLUTION_NOT_FOUND"


def test_validation_errors_are_400_with_codes(service):
    client, demo = service
    sid = new_session(client)
    name = upload_demo(client, sid, demo)
    bad = dict(BUDGET_PROBLEM, target="nope")
    r = client.post(f"/sessions/{sid}/problems", json={"dataset": name, **bad})
    assert r.status_code == 400
    assert r.json()["error"] == "TARGET_NOT_FOUND"
    assert "nope" in r.json()["detail"]

    missing = {k: v for k, v in BUDGET_PROBLEM.items() if k != "target"}
    r = client.post(f"/sessions/{sid}/problems", json={"dataset": name, **missing})
    assert r.status_code == 400
    assert r.json()["error"] == "SCHEMA_ERROR"

    r = client.post(f"/sessions/{sid}/datasets", params={"name": "broken"},
                    content=b"a,b\n1\n")
    assert r.status_code == 400
    assert r.json()["error"] == "PARSE_ERROR"


def test_prepare_endpoint(service):
    client, demo = service
    sid = new_session(client)
    name = upload_demo(client, sid, demo)
    actions = [{"action": "exclude_column", "name": "date"},
               {"action": "drop_rows_outside", "name": "collisions",
                "low": 0.0, "high": 1000.0}]
    r = client.post(f"/sessions/{sid}/datasets/{name}/prepare",
                    json={"actions": actions})
    assert r.status_code == 200
    doc = r.json()
    assert doc["name"] == f"{name}_prepared"
    assert [c["name"] for c in doc["columns"]] == ["trips", "collisions"]
    assert doc["provenance"]["kind"] == "prepared"
    assert len(doc["applied"]) == 2

    r = client.post(f"/sessions/{sid}/datasets/{name}/prepare",
                    json={"actions": [{"action": "fill_missing", "name": "date",
                                       "constant": "xx"}]})
    assert r.status_code == 400
    assert r.json()["error"] == "INVALID_PREP_ACTION"


def test_upload_name_collision_dedupes(service):
    client, demo = service
    sid = new_session(client)
    first = upload_demo(client, sid, demo)
    second = upload_demo(client, sid, demo)
    assert first == "collisions"
    assert second == "collisions_2"


def test_metric_sort_matches_client_side_order(service):
    client, demo = service
    sid = new_session(client)
    name = upload_demo(client, sid, demo)
    pid = client.post(f"/sessions/{sid}/problems",
                      json={"dataset": name, **BUDGET_PROBLEM}).json()["problem_id"]
    rid = client.post(f"/sessions/{sid}/problems/{pid}/search",
                      json={"seed": 3}).json()["run_id"]
    run_to_finish(client, sid, rid)
    doc = client.get(f"/sessions/{sid}/runs/{rid}/solutions",
                     params={"sort": "rmse"}).json()
    values = [s["report"]["metrics"]["rmse"] for s in doc["solutions"]]
    present = [v for v in values if v is not None]
    assert present == sorted(present)  # lower is better for rmse

    r = client.get(f"/sessions/{sid}/runs/{rid}/solutions", params={"sort": "zzz"})
    assert r.status_code == 400
    assert r.json()["error"] == "UNKNOWN_METRIC"


def test_stale_candidate_is_409(service, demo):
    client, _ = service
    sid = new_session(client)
    name = upload_demo(client, sid, demo)
    cands = client.get(f"/sessions/{sid}/datasets/{name}/augment",
                       params={"keywords": "weather"}).json()["candidates"]
    weather = [c for c in cands if c["entry"]["name"] == "weather"][0]

    weather_csv = Path(demo["corpus"]) / "weather.csv"
    original = weather_csv.read_text()
    try:
        lines = original.splitlines()
        parts = lines[1].split(",")
        parts[1] = "12345.0"
        lines[1] = ",".join(parts)
        weather_csv.write_text("\n".join(lines) + "\n")
        r = client.post(f"/sessions/{sid}/datasets/{name}/augment/apply",
                        json={"candidate_id": weather["candidate_id"]})
        assert r.status_code == 409
        assert r.json()["error"] == "STALE_CANDIDATE"
    finally:
        weather_csv.write_text(original)

    r = client.post(f"/sessions/{sid}/datasets/{name}/augment/apply",
                    json={"candidate_id": "ghost:join"})
    assert r.status_code == 404
    assert r.json()["error"] == "CANDIDATE_NOT_FOUND"


def test_cancel_is_idempotent(service):
    client, demo = service
    sid = new_session(client)
    name = upload_demo(client, sid, demo)
    pid = client.post(f"/sessions/{sid}/problems",
                      json={"dataset": name, **BUDGET_PROBLEM}).json()["problem_id"]
    rid = client.post(f"/sessions/{sid}/problems/{pid}/search",
                      json={}).json()["run_id"]
    r1 = client.delete(f"/sessions/{sid}/runs/{rid}")
    assert r1.status_code == 200
    assert r1.json()["state"].startswith("finished(")
    r2 = client.delete(f"/sessions/{sid}/runs/{rid}")
    assert r2.status_code == 200
    assert r2.json()["state"] == r1.json()["state"]


def test_persist_and_reload_identical_payloads(tmp_path, demo):
    root = tmp_path / "sessions"
    app = create_app(session_root=root, corpus_dir=demo["corpus"])
    with TestClient(app) as client:
        sid = new_session(client)
        name = upload_demo(client, sid, demo)
        pid = client.post(f"/sessions/{sid}/problems",
                          json={"dataset": name, **BUDGET_PROBLEM}).json()["problem_id"]
        rid = client.post(f"/sessions/{sid}/problems/{pid}/search",
                          json={"seed": 5}).json()["run_id"]
        run_to_finish(client, sid, rid)
        before = {
            "profile": client.get(f"/sessions/{sid}/datasets/{name}/profile").json(),
            "problems": client.get(f"/sessions/{sid}/problems").json(),
            "solutions": client.get(f"/sessions/{sid}/runs/{rid}/solutions").json(),
            "summary": client.get(f"/sessions/{sid}/runs/{rid}/summary").json(),
            "parallel": client.get(f"/sessions/{sid}/runs/{rid}/parallel").json(),
            "events": client.get(f"/sessions/{sid}/runs/{rid}/events").json(),
        }
        best = before["solutions"]["ranking"][0]
        before["pdp"] = client.get(
            f"/sessions/{sid}/runs/{rid}/solutions/{best}/explain/pdp",
            params={"feature": "trips"}).json()

    fresh = create_app(session_root=root, corpus_dir=demo["corpus"])
    with TestClient(fresh) as client:
        after = {
            "profile": client.get(f"/sessions/{sid}/datasets/{name}/profile").json(),
            "problems": client.get(f"/sessions/{sid}/problems").json(),
            "solutions": client.get(f"/sessions/{sid}/runs/{rid}/solutions").json(),
            "summary": client.get(f"/sessions/{sid}/runs/{rid}/summary").json(),
            "parallel": client.get(f"/sessions/{sid}/runs/{rid}/parallel").json(),
            "events": client.get(f"/sessions/{sid}/runs/{rid}/events").json(),
        }
        best = after["solutions"]["ranking"][0]
        after["pdp"] = client.get(
            f"/sessions/{sid}/runs/{rid}/solutions/{best}/explain/pdp",
            params={"feature": "trips"}).json()
    assert before == after
