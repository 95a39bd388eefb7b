from __future__ import annotations

import json
from pathlib import Path

import pytest

from tabpilot.service.cli import main


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    root = tmp_path_factory.mktemp("clidemo")
    assert main(["make-demo", "--out", str(root), "--seed", "0"]) == 0
    return {"dataset": str(root / "collisions.csv"),
            "problem": str(root / "problem.json"),
            "corpus": str(root / "corpus")}


def test_run_happy_path(demo, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", demo["dataset"], demo["problem"], str(out),
                 "--corpus", demo["corpus"], "--keywords", "weather",
                 "--seed", "7"])
    assert code == 0
    captured = capsys.readouterr()
    assert "best mae=" in captured.out

    doc = json.loads((out / "solutions.json").read_text())
    budget = json.loads(Path(demo["problem"]).read_text())["budget"]["max_pipelines"]
    assert 1 <= len(doc["solutions"]) <= budget
    assert doc["ranking"][0] in {s["solution_id"] for s in doc["solutions"]}

    table = (out / "ranking.txt").read_text().splitlines()
    assert table[0].startswith("rank")
    assert len(table) == 1 + len(doc["ranking"])

    explain_files = list((out / "explanations").glob("*.json"))
    assert len(explain_files) == len(doc["ranking"])
    one = json.loads(explain_files[0].read_text())
    assert "scatter" in one and "pdp" in one

    aug = json.loads((out / "augment.json").read_text())
    assert aug["candidates"][0]["entry"]["name"] == "weather"


def test_same_seed_byte_identical(demo, tmp_path):
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["run", demo["dataset"], demo["problem"], str(out),
                     "--seed", "13"]) == 0
        outs.append((out / "solutions.json").read_bytes())
    assert outs[0] == outs[1]


def test_bad_target_exits_1(demo, tmp_path, capsys):
    problem = json.loads(Path(demo["problem"]).read_text())
    problem["target"] = "no_such_column"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(problem))
    code = main(["run", demo["dataset"], str(bad), str(tmp_path / "out")])
    assert code == 1
    err = capsys.readouterr().err
    assert "no_such_column" in err
    assert "TARGET_NOT_FOUND" in err


def test_unreadable_inputs_exit_1(demo, tmp_path, capsys):
    code = main(["run", str(tmp_path / "missing.csv"), demo["problem"],
                 str(tmp_path / "out")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_zero_scored_exits_2(tmp_path, capsys):
    csv = tmp_path / "tiny.csv"
    csv.write_text("x,y\n1,2\n2,4\n3,6\n4,8\n")
    problem = {"task_type": "regression", "target": "y", "features": ["x"],
               "primary_metric": "mae",
               "budget": {"max_pipelines": 3, "time_limit_seconds": 10},
               "eval_method": {"kind": "kfold", "k": 5}}
    p = tmp_path / "p.json"
    p.write_text(json.dumps(problem))
    code = main(["run", str(csv), str(p), str(tmp_path / "out")])
    assert code == 2
    assert "no scored solutions" in capsys.readouterr().err
    doc = json.loads((tmp_path / "out" / "solutions.json").read_text())
    assert doc["ranking"] == []
    assert all(s["status"] == "failed" for s in doc["solutions"])
