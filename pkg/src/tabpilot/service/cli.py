"""Headless command line: run a search end to end, serve the HTTP API, or
generate the bundled demo data.

``run`` exits 0 when at least one solution scored, 1 on input or validation
errors, and 2 when the search finished without a single scored solution.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..augment import index_corpus, search_augmentations
from ..data_model import ingest_csv
from ..demo import make_demo
from ..errors import TabpilotError
from ..explain import (confusion_matrix, confusion_scatter, extract_rules,
                       partial_dependence, pdp_features)
from ..problem_spec import TaskType, parse, validate
from ..search import rank_solutions, run_search

PDP_LIMIT = 3  # feature curves written per solution


def _explanations(run, solution, dataset, vspec) -> dict:
    out: dict = {}
    fitted = run.fitted_model(solution.solution_id)
    task = vspec.task_type

    def attempt(key, fn):
        try:
            out[key] = fn()
        except TabpilotError as exc:
            out[key] = {"error": exc.code, "detail": str(exc)}

    if task == TaskType.CLASSIFICATION:
        attempt("confusion_matrix", lambda: confusion_matrix(solution.report, task))
        if fitted is not None:
            attempt("rules", lambda: extract_rules(fitted, dataset, vspec).to_dict())
    else:
        attempt("scatter", lambda: confusion_scatter(solution.report, task))
        if fitted is not None:
            curves = {}
            for feature in pdp_features(fitted, dataset, vspec)[:PDP_LIMIT]:
                try:
                    curves[feature] = partial_dependence(fitted, dataset, vspec, feature)
                except TabpilotError as exc:
                    curves[feature] = {"error": exc.code, "detail": str(exc)}
            out["pdp"] = curves
    return out


def cmd_run(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    try:
        csv_path = Path(args.dataset)
        dataset = ingest_csv(csv_path.read_bytes(), name=csv_path.stem)
        problem_doc = json.loads(Path(args.problem).read_text(encoding="utf-8"))
        vspec = validate(parse(problem_doc), dataset)
    except TabpilotError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_dir.mkdir(parents=True, exist_ok=True)
    run = run_search(dataset, vspec, seed=args.seed, run_id="run")
    scored = run.scored_solutions()

    primary = vspec.spec.primary_metric
    ranking = rank_solutions(run, primary) if scored else []
    payload = {
        "seed": args.seed,
        "stop_reason": run.finish_reason,
        "primary_metric": primary.value,
        "ranking": ranking,
        "solutions": [s.to_dict() for s in run.solutions],
    }
    (out_dir / "solutions.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")

    lines = [f"{'rank':<6}{'solution':<14}{primary.value:<12}pipeline"]
    by_id = {s.solution_id: s for s in run.solutions}
    for i, sid in enumerate(ranking, start=1):
        sol = by_id[sid]
        value = sol.metric_value(primary)
        shown = "n/a" if value is None else f"{value:.6g}"
        steps = " > ".join(st.name for st in sol.pipeline.steps)
        lines.append(f"{i:<6}{sid:<14}{shown:<12}{steps}")
    (out_dir / "ranking.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    explain_dir = out_dir / "explanations"
    explain_dir.mkdir(exist_ok=True)
    for sol in scored:
        doc = _explanations(run, sol, dataset, vspec)
        (explain_dir / f"{sol.solution_id}.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")

    if args.corpus:
        corpus = index_corpus(args.corpus)
        keywords = args.keywords.split(",") if args.keywords else []
        candidates = search_augmentations(corpus, dataset, keywords)
        (out_dir / "augment.json").write_text(
            json.dumps({"keywords": keywords,
                        "candidates": [c.to_dict() for c in candidates]},
                       indent=2, sort_keys=True), encoding="utf-8")

    if not scored:
        print("no scored solutions", file=sys.stderr)
        return 2
    best = by_id[ranking[0]]
    print(f"{len(scored)} scored, best {primary.value}="
          f"{best.metric_value(primary):.6g} ({best.solution_id})")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .app import create_app

    app = create_app(session_root=args.sessions, corpus_dir=args.corpus,
                     default_seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_make_demo(args: argparse.Namespace) -> int:
    paths = make_demo(args.out, seed=args.seed)
    for key, value in sorted(paths.items()):
        print(f"{key}: {value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tabpilot")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a search headlessly")
    p_run.add_argument("dataset", help="CSV file")
    p_run.add_argument("problem", help="problem spec JSON file")
    p_run.add_argument("out", help="output directory")
    p_run.add_argument("--corpus", default=None, help="augmentation corpus directory")
    p_run.add_argument("--keywords", default="", help="comma-separated corpus keywords")
    p_run.add_argument("--seed", type=int, default=int(os.environ.get("TABPILOT_SEED", 0)))
    p_run.set_defaults(fn=cmd_run)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--host", default=os.environ.get("TABPILOT_HOST", "127.0.0.1"))
    p_serve.add_argument("--port", type=int,
                         default=int(os.environ.get("TABPILOT_PORT", 8000)))
    p_serve.add_argument("--sessions",
                         default=os.environ.get("TABPILOT_SESSIONS", "./sessions"))
    p_serve.add_argument("--corpus", default=os.environ.get("TABPILOT_CORPUS"))
    p_serve.add_argument("--seed", type=int, default=int(os.environ.get("TABPILOT_SEED", 0)))
    p_serve.set_defaults(fn=cmd_serve)

    p_demo = sub.add_parser("make-demo", help="write the bundled demo data")
    p_demo.add_argument("--out", default="./demo")
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.set_defaults(fn=cmd_make_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
